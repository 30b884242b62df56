"""
Módulo de redes neurais.
Camadas com retropropagação manual, rede RP ConvNet / totalmente conectada, perdas,
otimizadores, treino com seleção por validação e persistência MDL1.
"""
