"""DR-LSSV air-quality forecasting pipeline (C++ core bindings)."""

try:
    from . import _drlssv as _core
except ImportError:  # e.g. the extension is on sys.path but not installed
    import _drlssv as _core

__all__ = [
    "POLLUTANTS",
    "ConfigError",
    "DataError",
    "LssvModel",
    "SchemaError",
    "compute_aqi",
    "denoise",
    "dht_forward",
    "dht_inverse",
    "kendall_tau",
    "load_model",
    "run_pipeline",
    "select_features",
    "sub_index",
    "tau_band",
    "train_lssv",
    "write_synth",
]

for _name in __all__:
    globals()[_name] = getattr(_core, _name)
del _name
