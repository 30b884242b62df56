"""
Módulo de features.
Tabelas de features de nós e pares: RP DotProd, oráculo exato, IGF e Gram rotacionalmente invariante.
"""
