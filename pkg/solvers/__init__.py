# Numerical solvers package
