"""DES-like Feistel ciphers over finite abelian groups and the cycling-test
machinery for probing closure, purity, parity, and generated-group order."""

from .groups import GroupSpec, characteristic, cyclic, gadd, gsub
from .words import (
    Word,
    concat,
    int_to_word,
    parse_word,
    split_halves,
    word_add,
    word_sub,
    word_to_int,
    word_to_text,
)
from .permnet import (
    CipherSpec,
    ExplicitRoundFunction,
    WireMap,
    fn_odot,
    gdes_decrypt,
    gdes_encrypt,
    identity_cipher,
    psi,
    round_tables,
    sigma,
    sigma_inv,
    swap_cipher,
    wiremap_apply,
    wiremap_invert,
)
from .sbox import (
    SBox,
    SBoxRoundSpec,
    expand_cipher,
    random_cipher_spec,
    round_function_f,
    sbox_audit,
    sbox_expand,
    sbox_generate,
    sbox_lookup,
)
from .edes import edes_decrypt, edes_encrypt, edes_spec, edes_trace

__all__ = [name for name in dir() if not name.startswith("_")]
