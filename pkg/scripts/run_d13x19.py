"""D = 13*19, weight (2,0): the Yoshida line inside the big block mod 7, on both genera."""

from quinary.eigen import format_poly
from quinary.experiments import run_d13x19


def main():
    r = run_d13x19()
    print("Yoshida eigenvalue at 2:", r.yoshida)
    for name, s in (("D-=13, D+=19, d=19", r.a_side), ("D-=19, D+=13, d=13", r.b_side)):
        print(f"{name}: {len(s.genus)} classes, space dim {s.space.dim}")
        print("  T(2) factor degrees:", [len(f) - 1 for f in s.factors])
        print("  rational line:", s.lift_eigenvalue, "=", s.lift_eigenvalue % 7, "mod 7")
        print("  line inside the degree", len(s.big_block), "block mod 7:", s.contained_mod7)
    same = max(r.a_side.factors, key=len) == max(r.b_side.factors, key=len)
    print("big blocks share a characteristic polynomial:", same)
    print("level 19 eigenvalues (classical):", r.level19_eigenvalues)
    print("  vs a_p + p + p^4 mod 7:", r.congruence_mod7)
    print("big block:", format_poly(max(r.a_side.factors, key=len))[:80], "...")


if __name__ == "__main__":
    main()
