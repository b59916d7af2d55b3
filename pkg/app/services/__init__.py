# Algorithms behind the subcommands: encodings, counting, lattice, chains, coalescent, statistics
