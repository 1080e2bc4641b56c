from ._firlock import (
    AttackReport,
    FirlockError,
    Netlist,
    ProtectedDesign,
    cli,
    gen_filter,
    golden_convolution,
    hybridize,
    lock_point,
    obfuscate,
    parse_bench,
    plain_block,
    query_attack,
    sat_attack,
    verify_key,
    zpfr,
)

__all__ = [
    "AttackReport",
    "FirlockError",
    "Netlist",
    "ProtectedDesign",
    "cli",
    "gen_filter",
    "golden_convolution",
    "hybridize",
    "lock_point",
    "obfuscate",
    "parse_bench",
    "plain_block",
    "query_attack",
    "sat_attack",
    "verify_key",
    "zpfr",
]
