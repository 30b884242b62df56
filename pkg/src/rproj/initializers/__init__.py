"""
Estratégias de inicialização de R^(0) - Padrão Strategy.
"""
