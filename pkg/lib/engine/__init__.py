from .runner import Runner, RunConfig, COMMANDS, EXIT_OK, EXIT_INVALID, EXIT_NOT_CONVERGED
