# mkit: invariants and normal forms of Martinet pairs (omega, f) on the plane
