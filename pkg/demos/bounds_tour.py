"""Print the exact exponent bounds for a few small configurations."""

from lojasiewicz.bounds import (infinity_regular_bound, local_map_bound, regular_local_bound,
                                separation_bound)

if __name__ == "__main__":
    for N, r, d in [(2, 0, 2), (2, 1, 2), (3, 2, 3)]:
        print(f"separation N={N} r={r} d={d}:", separation_bound(N, r, d).value,
              "isolated:", separation_bound(N, r, d, isolated=True).value)
    # polynomial map of degree 3 on a half plane {g >= 0} with deg g = 1
    print("local map:", local_map_bound(2, 1, 1, 1, 3).value)
    print("regular, real vs complex:", regular_local_bound(3, 2, "REAL").value, regular_local_bound(3, 2, "COMPLEX").value)
    print("at infinity, N=2 d=2:", infinity_regular_bound(2, 2).value)
