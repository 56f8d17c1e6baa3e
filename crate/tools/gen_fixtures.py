#!/usr/bin/env python3
"""Generate STO-3G FCIDUMP fixture sets with PySCF.

Each set gets a directory under fixtures/ holding one FCIDUMP per geometry
and a manifest.toml sidecar (geometry, basis, provenance, hashes, and PySCF
FCI reference energies used as an external cross-check in tests).

    python3 tools/gen_fixtures.py [outdir]
"""
import hashlib
import os
import sys

import numpy as np
import pyscf
from pyscf import ao2mo, fci, gto, mcscf, scf

OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "fixtures")
TOL = 1e-12


def write_fcidump(path, mf, nelec, ms2=0):
    mo = mf.mo_coeff
    n = mo.shape[1]
    h1 = mo.T @ mf.get_hcore() @ mo
    eri = ao2mo.restore(1, ao2mo.full(mf.mol, mo), n)
    lines = [f"&FCI NORB={n},NELEC={nelec},MS2={ms2},", " ORBSYM=" + "1," * n, " ISYM=1,", "&END"]
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                        continue
                    v = eri[i, j, k, l]
                    if abs(v) > TOL:
                        lines.append(f"{v:24.17e} {i+1:3d} {j+1:3d} {k+1:3d} {l+1:3d}")
    for i in range(n):
        for j in range(i + 1):
            v = h1[i, j]
            if abs(v) > TOL:
                lines.append(f"{v:24.17e} {i+1:3d} {j+1:3d}   0   0")
    for i in range(n):
        lines.append(f"{mf.mo_energy[i]:24.17e} {i+1:3d}   0   0   0")
    lines.append(f"{mf.energy_nuc():24.17e}   0   0   0   0")
    text = "\n".join(lines) + "\n"
    with open(path, "w") as f:
        f.write(text)
    return hashlib.sha256(text.encode()).hexdigest()


def run(atom):
    mol = gto.M(atom=atom, basis="sto-3g", unit="angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    assert mf.converged
    return mol, mf


def fci_energy(mf):
    return fci.FCI(mf).kernel()[0]


def casci_energy(mf, ncore, ncas, nelecas):
    mc = mcscf.CASCI(mf, ncas, nelecas)
    mc.ncore = ncore
    return mc.kernel()[0]


def pi_orbitals(mol, mf):
    """MO indices dominated by p_x/p_y character (molecule along z)."""
    labels = mol.ao_labels()
    px_py = [i for i, l in enumerate(labels) if "px" in l or "py" in l]
    out = []
    for k in range(mf.mo_coeff.shape[1]):
        c = mf.mo_coeff[:, k]
        w = np.sum(c[px_py] ** 2) / np.sum(c ** 2)
        if w > 0.5:
            out.append(k)
    return out


def header(f, molecule, atoms, active):
    f.write(f'molecule = "{molecule}"\n')
    f.write('basis = "STO-3G"\n')
    f.write('convention = "chemist"\n')
    f.write('geometry_unit = "angstrom,degree"\n')
    f.write(f'generator = "pyscf {pyscf.__version__} RHF, tools/gen_fixtures.py"\n')
    f.write("atoms = [" + ", ".join(f'"{a}"' for a in atoms) + "]\n")
    f.write("\n[active_space]\n")
    f.write(f"frozen = {active[0]}\nremoved = {active[1]}\n")


def gen_h2():
    d = os.path.join(OUT, "h2_sto3g")
    os.makedirs(d, exist_ok=True)
    grid = [round(0.30 + 0.05 * i, 3) for i in range(45)] + [0.735]
    with open(os.path.join(d, "manifest.toml"), "w") as m:
        header(m, "H2", ["H", "H"], ([], []))
        for r in grid:
            mol, mf = run(f"H 0 0 0; H 0 0 {r}")
            name = f"h2_r{r:.3f}.fcidump"
            h = write_fcidump(os.path.join(d, name), mf, 2)
            m.write(f'\n[[fixture]]\nfile = "{name}"\ngeometry = [{r}]\nsha256 = "{h}"\n')
            m.write(f"reference_fci = {fci_energy(mf):.15f}\n")


def gen_lih():
    d = os.path.join(OUT, "lih_sto3g")
    os.makedirs(d, exist_ok=True)
    grid = [round(1.00 + 0.05 * i, 3) for i in range(45)]
    with open(os.path.join(d, "manifest.toml"), "w") as m:
        header(m, "LiH", ["Li", "H"], ([0], []))
        for r in grid:
            mol, mf = run(f"Li 0 0 0; H 0 0 {r}")
            pis = pi_orbitals(mol, mf)
            assert pis == [3, 4], (r, pis)
            name = f"lih_r{r:.3f}.fcidump"
            h = write_fcidump(os.path.join(d, name), mf, 4)
            m.write(f'\n[[fixture]]\nfile = "{name}"\ngeometry = [{r}]\nsha256 = "{h}"\n')
            m.write(f"pi_orbitals = {pis}\n")
            m.write(f"reference_fci_all_electron = {fci_energy(mf):.15f}\n")
            m.write(f"reference_fci = {casci_energy(mf, 1, 5, 2):.15f}\n")
            m.write(f"reference_fci_frozen_core_no_pi = {reduced_lih(mf):.15f}\n")


def reduced_lih(mf):
    # core 0 frozen, orbitals 1,2,5 active (pi pair 3,4 removed)
    mc = mcscf.CASCI(mf, 3, 2)
    mo = mcscf.sort_mo(mc, mf.mo_coeff, [2, 3, 6])
    return mc.kernel(mo)[0]


def gen_water():
    d = os.path.join(OUT, "h2o_sto3g")
    os.makedirs(d, exist_ok=True)
    rs = [round(0.98 + 0.01 * i, 3) for i in range(11)]
    angles = [92.0 + i for i in range(11)]
    with open(os.path.join(d, "manifest.toml"), "w") as m:
        header(m, "H2O", ["O", "H", "H"], ([0], []))
        for r in rs:
            for a in angles:
                t = np.radians(a / 2)
                atom = f"O 0 0 0; H {r*np.sin(t):.12f} {r*np.cos(t):.12f} 0; H {-r*np.sin(t):.12f} {r*np.cos(t):.12f} 0"
                mol, mf = run(atom)
                name = f"h2o_r{r:.3f}_a{a:05.1f}.fcidump"
                h = write_fcidump(os.path.join(d, name), mf, 10)
                m.write(f'\n[[fixture]]\nfile = "{name}"\ngeometry = [{r}, {a}]\nsha256 = "{h}"\n')
                m.write(f"reference_fci = {casci_energy(mf, 1, 6, 8):.15f}\n")


if __name__ == "__main__":
    gen_h2()
    gen_lih()
    gen_water()
