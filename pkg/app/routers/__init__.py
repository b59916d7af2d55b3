# Subcommand modules for the tree-shape CLI
