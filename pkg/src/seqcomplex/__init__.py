"""Sequential complexity measures, exact online games and learners on finite classes."""
from .classes import AlphaGrid, FunctionClass, as_fraction, floor_alpha
from .complexity import dudley_bound, massart_bound, rad_fixed_tree, rad_sup
from .covers import (cover, cover_construct, cover_number, g_k, is_cover, packing_number,
                     pointwise_entropy, strong_packing_number, zero_cover_min)
from .errors import (CapacityError, ContractError, DomainError, KindError, ProtocolError,
                     SeqComplexError, StructureError)
from .games import GameSpec, value_dual, value_primal
from .learners import AgnosticLearner, EWALearner, FatSOA, simulate
from .rng import rng
from .shattering import extract_shattered_tree, fat_dim, ldim
from .suites import run_suite
from .tailbounds import pollard_check
from .trees import Tree

__version__ = "0.1.0"
