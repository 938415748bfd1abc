# -*- coding: utf-8 -*-
#
# Sphinx configuration for the cbirtils API reference.

import os, sys

sys.path.insert(0, os.path.abspath(".."))


project = "cbirtils"
copyright = "2026, cbirtils developers"
author = "cbirtils developers"
release = "0.1.0.dev1"
version = release

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
    "autodocsumm",
]

# docstrings link to these through :py:class: roles
intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "pandas": ("https://pandas.pydata.org/docs", None),
    "skimage": ("https://scikit-image.org/docs/stable", None),
}

source_suffix = ".rst"
master_doc = "index"
exclude_patterns = []

# members in source order
autodoc_member_order = "bysource"
add_module_names = False

html_theme = "sphinx_rtd_theme"
html_theme_options = {"navigation_depth": 3}
htmlhelp_basename = "cbirtilsdoc"
