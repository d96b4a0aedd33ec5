"""Quantum f-divergences between normal states on finite semifinite algebras."""
