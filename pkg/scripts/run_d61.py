"""D = 61: genus, T(2) spectrum, and the 43 congruence between the x+7 line and the sextic block."""

from quinary.eigen import format_poly
from quinary.experiments import irreducible_factors, run_d61


def main():
    r = run_d61()
    print(f"classes: {len(r.genus)}  mass: {r.genus.mass()}  seed isometric to q61: {r.seed_isometric_to_q61}")
    print("T(2):")
    for row in r.t2:
        print("  ", row)
    print("charpoly:", " * ".join(f"({format_poly(f)})" for f in irreducible_factors(r.charpoly)))
    print("class relabeling onto the expected matrix:", r.permutation)
    print("saturated x+7 line:", r.v61)
    print("sextic eigenvector mod 43:", r.sk_vector_mod43)
    print("verdict mod 43:", r.verdict43, " verdict mod 5:", r.verdict5)


if __name__ == "__main__":
    main()
