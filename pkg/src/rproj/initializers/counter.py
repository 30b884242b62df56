"""
Uniformes baseados em contador (Philox): o valor na posição `index` é função pura
de (seed, index).
"""
import numpy as np

_LANES = 4  # saídas de 64 bits por valor de contador do Philox 4x64


def counter_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """
    Uniformes em (0, 1) nas posições start..start+count-1 do fluxo de chave `seed`.

    Args:
        seed: Chave do gerador
        start: Primeira posição
        count: Quantidade de valores

    Returns:
        Array float64 com `count` valores
    """
    offset = start % _LANES
    bit_generator = np.random.Philox(key=seed, counter=start // _LANES)
    raw = bit_generator.random_raw(count + offset)[offset:]
    # 53 bits de mantissa, deslocados de meio ulp para excluir 0 e 1
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
