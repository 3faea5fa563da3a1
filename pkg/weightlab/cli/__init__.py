"""The cli package contains the subcommands of the ``weightlab`` command."""
