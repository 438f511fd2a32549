"""Regenerate the FCIDUMP fixtures under crates/core/data.

Requires PySCF. Every fixture is a canonical RHF run in the full MO space;
frozen-core reduction is applied by the Rust library, not here.
"""
import math
import os

from pyscf import fci, gto, scf
from pyscf.tools import fcidump

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data")


def run(name, atoms, basis, note):
    mol = gto.M(atom=atoms, basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    assert mf.converged, name
    path = os.path.join(OUT, name + ".fcidump")
    fcidump.from_scf(mf, path, tol=1e-14)
    e_fci = fci.FCI(mf).kernel()[0]
    return name, basis, note, mf.e_tot, e_fci


def h4(beta_deg, radius=1.738):
    half = math.radians(beta_deg) / 2.0
    x, y = radius * math.cos(half), radius * math.sin(half)
    return [("H", (x, y, 0)), ("H", (-x, y, 0)), ("H", (-x, -y, 0)), ("H", (x, -y, 0))]


def h2o(d, angle=104.51):
    half = math.radians(angle) / 2.0
    return [
        ("O", (0, 0, 0)),
        ("H", (d * math.sin(half), d * math.cos(half), 0)),
        ("H", (-d * math.sin(half), d * math.cos(half), 0)),
    ]


def main():
    rows = []
    rows.append(run("h2_sto3g_0.735", [("H", (0, 0, 0)), ("H", (0, 0, 0.735))], "sto-3g", "H2 bond 0.735 A"))
    rows.append(run("h2_631g_0.546", [("H", (0, 0, 0)), ("H", (0, 0, 0.546))], "6-31g", "H2 bond 0.546 A"))
    for beta in range(85, 96):
        rows.append(run(f"h4_sto3g_beta{beta}", h4(beta), "sto-3g", f"H4 ring R=1.738 A, beta={beta} deg"))
    for d in [1.754, 1.845, 1.937, 2.028, 2.119, 2.211, 2.302, 2.393]:
        rows.append(run(f"h2o_sto3g_d{d:.3f}", h2o(d), "sto-3g", f"H2O OH={d} A, HOH=104.51 deg"))
    rows.append(run("n2_sto3g_1.200", [("N", (0, 0, 0)), ("N", (0, 0, 1.2))], "sto-3g", "N2 bond 1.2 A"))
    with open(os.path.join(OUT, "PROVENANCE.md"), "w") as fh:
        fh.write("# Fixture provenance\n\n")
        fh.write("Generated by `scripts/gen_fixtures.py` (PySCF canonical RHF, conv_tol 1e-12,\n")
        fh.write("full MO space, chemist-notation FCIDUMP). Energies in Hartree; FCI is the\n")
        fh.write("full-space PySCF FCI value, recorded for cross-checking.\n\n")
        fh.write("| file | basis | geometry | E(RHF) | E(FCI) |\n|---|---|---|---|---|\n")
        for name, basis, note, ehf, efci in rows:
            fh.write(f"| {name}.fcidump | {basis} | {note} | {ehf:.10f} | {efci:.10f} |\n")


if __name__ == "__main__":
    main()
