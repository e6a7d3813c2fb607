"""Translations between the LIO fragment of LTL and almost linear Büchi
automata, with fragment/class checks and a bounded lasso-word oracle."""

__version__ = "0.1.0"
