"""Hofstadter bands from gauge-invariant variables.

The pi-flux spectrum against its closed form, the two constructions against
each other and against real-space diagonalisation, and a small butterfly.
Writes CSV files to the current directory.
"""

from givlattice.hofstadter import (
    HofstadterParams,
    band_matrix_order,
    butterfly,
    pi_flux_deviation,
    real_space_spectrum,
    spectra_coincide,
    spectrum,
    write_butterfly_csv,
    write_spectrum_csv,
)

for dim, N in ((2, 8), (3, 4)):
    p = HofstadterParams.for_size(dim, 1, 2, N)
    s = spectrum(p)
    print(f"{dim}d pi-flux N={N}: {len(s)} energies, max deviation from closed form {pi_flux_deviation(s):.1e}")

for dim, N in ((2, 6), (3, 9)):
    for m in (1, 2):
        pa = HofstadterParams.for_size(dim, m, 3, N, "asymmetric")
        ps = HofstadterParams.for_size(dim, m, 3, N, "symmetric")
        sa, ss = spectrum(pa, "asymmetric"), spectrum(ps, "symmetric")
        ed = real_space_spectrum(pa)
        print(f"{dim}d flux 2pi*{m}/3, N={N}: band orders {band_matrix_order(pa, 'asymmetric')} / "
              f"{band_matrix_order(ps, 'symmetric')}, asym-sym diff {spectra_coincide(sa, ss)['max_abs_diff']:.1e}, "
              f"asym-ED diff {spectra_coincide(sa, ed)['max_abs_diff']:.1e}")

write_spectrum_csv(spectrum(HofstadterParams.for_size(2, 1, 3, 6)), "spectrum_2d_m1_n3.csv")
rows = butterfly(12, kappa=2)
write_butterfly_csv(rows, "butterfly_2d_nmax12.csv")
print(f"butterfly: {len(rows)} energies written to butterfly_2d_nmax12.csv")
