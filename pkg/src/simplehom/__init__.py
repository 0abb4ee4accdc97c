"""Simple-loop homology of finite covers built from quantum representations."""

__version__ = "0.1.0"

from .config import Settings, load_settings
from .cyclotomic import INFINITE, CyclotomicInteger, HQuotElement, v_h
from .logging import get_logger, setup_logging
from .pantsrep import PantsRep, eval_word, pants_rep
from .projmat import ProjectiveMatrix, proj_order
from .words import GroupWord, parse_word

__all__ = [
    "Settings",
    "load_settings",
    "setup_logging",
    "get_logger",
    "INFINITE",
    "CyclotomicInteger",
    "HQuotElement",
    "v_h",
    "PantsRep",
    "pants_rep",
    "eval_word",
    "ProjectiveMatrix",
    "proj_order",
    "GroupWord",
    "parse_word",
]
