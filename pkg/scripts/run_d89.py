"""D = 89: the four rational T(2) lines and the sextic block, compared mod 29."""

from quinary.experiments import run_d89


def main():
    r = run_d89()
    print(f"classes: {len(r.genus)}  mass: {r.genus.mass()}  dims by character: {r.dims}")
    print(f"block degrees without the Eisenstein line x-{r.eisenstein}: {r.block_degrees}")
    print(f"line congruent to the sextic mod 29: eigenvalue {r.general_eigenvalue}")
    print("verdict mod 29:", r.verdict29)


if __name__ == "__main__":
    main()
