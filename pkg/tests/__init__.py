from .base import *
from .io import *
from .lbp import *
from .moments import *
from .features import *
from .retrieval import *
from .evaluation import *
from .synthetic import *
from .cli import *
