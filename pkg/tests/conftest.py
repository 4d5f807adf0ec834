from hypothesis import HealthCheck, settings

# the suite must be reproducible run to run; property tests draw a fixed
# example sequence
settings.register_profile(
    "deterministic",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")
