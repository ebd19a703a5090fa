"""Live session machinery: wire protocol, state machine, server, event log."""
