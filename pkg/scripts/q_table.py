"""Difficulty index Q(f) for the benchmark densities, next to the published values."""

from cvpsi.mixtures import catalog, q_difficulty

PUBLISHED = (1.99, 2.16, 4.36, 4.2, 3.26, 2.29, 2.59, 2.55, 2.62, 4.18, 7.08, 5.11, 3.82, 6.2, 5.32, 4.99)


def main():
    print(f"{'id':>3} {'Q':>7} {'published':>9} {'diff':>7}")
    for d, ref in enumerate(PUBLISHED, 1):
        q = q_difficulty(catalog(d))
        print(f"{d:>3} {q:7.3f} {ref:9.2f} {q - ref:+7.3f}")


if __name__ == "__main__":
    main()
