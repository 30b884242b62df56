"""
Camadas da rede - Padrão Strategy sobre a interface ILayer.
"""
