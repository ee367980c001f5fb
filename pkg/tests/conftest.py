import hypothesis

# derandomized so repeated runs exercise identical examples
hypothesis.settings.register_profile(
    "deterministic", derandomize=True, deadline=None, max_examples=25
)
hypothesis.settings.load_profile("deterministic")
