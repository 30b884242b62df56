"""
Implementações concretas de leitores de grafos.
"""
