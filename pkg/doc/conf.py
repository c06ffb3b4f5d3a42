# Sphinx configuration for rkhs-kit

import re

import rkhskit

# -- Project information -----------------------------------------------------

project = "rkhs-kit"
copyright = "2026, The rkhs-kit authors"
author = "The rkhs-kit authors"

# The full version, including alpha/beta/rc tags
release = rkhskit.__version__
# The short X.Y version
version = re.sub(r"([\d\.]+).*", r"\1", release)

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.viewcode",
]

source_suffix = ".rst"
master_doc = "index"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"

# -- Options for HTML output -------------------------------------------------

html_theme = "alabaster"
html_show_sourcelink = False
htmlhelp_basename = "rkhs-kitdoc"

# -- Options for manual page output ------------------------------------------

man_pages = [
    (master_doc, "rkhs-kit", "rkhs-kit Documentation", [author], 1)
]

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable/", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}
