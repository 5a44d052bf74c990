"""qembed: explicit bi-Lipschitz embeddings of flat quotient spaces, with audits.

Presents flat manifolds, flat orbifolds, lens spaces and locally flat vector
bundles as isometry-group quotients with exact enumeration-based distance
oracles, builds explicit embeddings into Euclidean space (McShane extension,
product/cone/patch/doubling/annulus/GH-transfer combinators, closed-form torus
and bundle maps), and audits the achieved distortion against the claimed
constants.
"""

from .geometry import Euclidean, Product, Sphere
from .quotient import (AffineIsometry, EnumerationCapError, GroupBall, Net,
                       QuotientSpace, build_net, compose, identity_isometry,
                       translation_isometry)
from .lattices import (ShortBasis, StratParams, canonical_grouping, diameter_bound,
                       lattice_space, scale_properties_check, short_basis)
from .holonomy import (CanonicalDecomposition, canonical_decomposition,
                       euclidean_fixed_point, invariant_circle, karcher_mean_sphere)
from .embeddings import (Embedding, NetFunction, circle_embedding, cone_embed,
                         identity_embedding, linear_embedding, mcshane_extend,
                         net_function_from_map, patch_two, product_embed,
                         quotient_circle_embedding, torus2_embedding,
                         verify_claim_bookkeeping)
from .combinators import annulus_embed, doubling_embed, gh_transfer, shear_sigma
from .spaces import (EllipsoidMesh, construct_space, cyclic_cone, ellipsoid_map,
                     flat_orbifold, flat_torus, holonomy_bundle, lens_chart_point,
                     lens_chart_tensor_ratio, lens_space)
from .audit import (DistortionReport, deserialize_embedding, empirical_distortion,
                    estimate_doubling, serialize_embedding)
from .pipelines import (bundle_annulus_pipeline, embed_space, ellipsoid_embedding,
                        lens_patched_embedding, torus_doubling_embedding)

__version__ = "0.1.0"
