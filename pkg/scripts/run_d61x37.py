"""D = 61*37, character 37: four 19-adic T(2) eigenvalues near -7 in a 2-dimensional kernel.

Takes about a minute.
"""

import time

from quinary.experiments import run_d61x37


def main():
    t = time.time()
    r = run_d61x37()
    print(f"classes: {len(r.genus)}  mass: {r.genus.mass()}  space dim: {r.dim}")
    print("T(2) block degrees:", r.block_degrees)
    print("dim ker(T(2)+7) mod 19:", r.kernel_dim19)
    for a, b in r.second_third_digits:
        print(f"  eigenvalue = -7 + {a}*19 + {b}*19^2 mod 19^3")
    print("pairwise non-collinear:", r.pairwise_noncollinear, " verdict:", r.verdict)
    print(f"{time.time() - t:.0f}s")


if __name__ == "__main__":
    main()
