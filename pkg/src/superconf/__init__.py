"""Formal N=1 superconformal change of variables for NS vertex operator superalgebras."""
