"""Parallel efficiency of the pipeline orderings as a function of block count.

Uses the deterministic schedule simulator (exact rational arithmetic), so the
numbers are the theoretical peaks, independent of hardware.
"""

from pipewr import efficiency_sweep, theoretical_efficiency


def main():
    K = 4
    Js = [8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192]

    print(f"two-stage method, K={K} iterates, 2NK workers (J >= 2K)")
    print(f"  {'J':>5} {'simulated':>10} {'closed form':>12}")
    for J, sim, theo in efficiency_sweep("nnwr", 2, K, Js):
        print(f"  {J:>5} {float(sim):>10.4f} {float(theo):>12.4f}")

    N = 8
    print(f"\none-stage method, N={N}, NK workers")
    print(f"  {'K':>2} {'J':>5} {'simulated':>10} {'closed form':>12}")
    for K in (1, 2, 3, 4):
        for J, sim, theo in efficiency_sweep("dnwr", N, K, [1024]):
            print(f"  {K:>2} {J:>5} {float(sim):>10.4f} {float(theo):>12.4f}")


if __name__ == "__main__":
    main()
