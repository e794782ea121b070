#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# chargeplan documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import os
import sys
sys.path.insert(0, os.path.abspath('..'))


# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.doctest',
    'sphinx.ext.todo',
    'sphinx.ext.coverage',
    'sphinx.ext.viewcode',
    # Non-standard extensions
    'sphinx_autodoc_typehints',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

# General information about the project.
project = 'chargeplan'
copyright = '2026, chargeplan developers'
author = 'chargeplan developers'

version = '0.1'
release = '0.1.0'

language = 'en'
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
pygments_style = 'sphinx'
todo_include_todos = True


# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'
html_theme_options = {
    'prev_next_buttons_location': 'both',
    'collapse_navigation': False,
    'sticky_navigation': True,
    'navigation_depth': 4,
}
htmlhelp_basename = 'chargeplandoc'


# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'chargeplan', 'chargeplan Documentation', [author], 1),
]
