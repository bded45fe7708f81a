from enum import Enum


class SearchEngine(str, Enum):
    BUCKET = "bucket"
    SPLIT = "split"


class OutcomeKind(str, Enum):
    SEPARATED = "separated"
    MINOR = "minor"


class SepKind(str, Enum):
    SEPARATOR = "separator"
    MINOR = "minor"
    INDETERMINATE = "indeterminate"


class MinorPattern(str, Enum):
    CLIQUE = "clique"
    BICLIQUE = "biclique"


class PatternRole(str, Enum):
    BRANCH = "branch"
    SUBDIVISION_A = "subdivision_a"
    SUBDIVISION_B = "subdivision_b"


class InvariantStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    UNVERIFIABLE = "unverifiable"
    NOT_APPLICABLE = "not_applicable"


class CollisionMethod(str, Enum):
    PAIRWISE = "pairwise"
    SUBTREE = "subtree"


class GraphFamily(str, Enum):
    GRID = "grid"
    GRID_TORUS = "grid_torus"
    PATH = "path"
    CYCLE = "cycle"
    STAR = "star"
    COMPLETE = "complete"
    RANDOM_GNM = "random_gnm"
    RANDOM_REGULAR = "random_regular"
