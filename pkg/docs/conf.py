# Configuration file for the Sphinx documentation builder.
#
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys

sys.path.insert(0, os.path.abspath(".."))

project = "isac_drt"
copyright = "2024, isac_drt developers"
author = "isac_drt developers"
release = "0.1.0"

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.napoleon",  # numpy style docstrings
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.mathjax",
]

root_doc = "modules"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

napoleon_numpy_docstring = True
napoleon_google_docstring = False
autodoc_member_order = "bysource"
autodoc_typehints = "description"

# -- Options for HTML output -------------------------------------------------
# API pages build without the numerical stack
autodoc_mock_imports = ["jax", "jaxlib", "scipy", "numpy"]

html_theme = "sphinx_rtd_theme"
html_title = "isac_drt"
