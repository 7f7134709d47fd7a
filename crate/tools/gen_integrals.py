#!/usr/bin/env python3
"""Generate the bundled spin-orbital integral tables under data/.

Requires pyscf. Each table is an RHF/STO-3G calculation followed by an
active-space projection (CASCI effective one-body operator and core energy),
written in spin-orbital form with interleaved (alpha, beta) layout and
physicist-ordered two-body integrals <pq|rs>.

    python3 tools/gen_integrals.py            # regenerate everything
"""
import json
import os
import sys

import numpy as np
from pyscf import gto, scf, mcscf, ao2mo, fci

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def h2(r):
    return f"H 0 0 0; H 0 0 {r}"


def lih(r):
    return f"Li 0 0 0; H 0 0 {r}"


def h2o(r, angle=104.5):
    t = np.radians(angle / 2)
    return (f"O 0 0 0; H {r * np.sin(t)} 0 {r * np.cos(t)}; "
            f"H {-r * np.sin(t)} 0 {r * np.cos(t)}")


def nh3(h, radius=0.98):
    s = "N 0 0 0"
    for k in range(3):
        a = 2 * np.pi * k / 3
        s += f"; H {radius * np.cos(a)} {radius * np.sin(a)} {-h}"
    return s


def table(name, atom, active, n_elec, geometry_note):
    mol = gto.M(atom=atom, basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    ncas = len(active)
    mc = mcscf.CASCI(mf, ncas, n_elec)
    mo = mc.sort_mo([a + 1 for a in active])
    h1, ecore = mc.get_h1eff(mo)
    eri = ao2mo.restore(1, mc.get_h2eff(mo), ncas)  # chemist (PQ|RS)
    e_cas = mc.kernel(mo)[0]

    n = 2 * ncas
    h_one = [[0.0] * n for _ in range(n)]
    for p in range(n):
        for q in range(n):
            if p % 2 == q % 2:
                h_one[p][q] = float(h1[p // 2, q // 2])
    h_two = []
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    if p % 2 != r % 2 or q % 2 != s % 2:
                        continue
                    v = float(eri[p // 2, r // 2, q // 2, s // 2])
                    if abs(v) > 1e-12:
                        h_two.append([p, q, r, s, v])
    doc = {
        "n_orbitals": n,
        "ordering": "physicist",
        "spin_layout": "interleaved",
        "n_electrons": n_elec,
        "e_const": float(ecore),
        "h_one": h_one,
        "h_two": h_two,
        "provenance": {
            "molecule": name,
            "basis": "sto-3g",
            "geometry": geometry_note,
            "atoms_angstrom": atom,
            "active_spatial_orbitals": list(active),
            "method": "pyscf RHF + CASCI active-space projection",
            "e_hf": float(mf.e_tot),
            "e_casci": float(e_cas),
        },
    }
    return doc


def write(path, doc):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as f:
        json.dump(doc, f, separators=(",", ":"))
        f.write("\n")
    p = doc["provenance"]
    print(f"{path}: n={doc['n_orbitals']} hf={p['e_hf']:.6f} casci={p['e_casci']:.6f}")


def main():
    for r in [0.5, 0.6, 0.7, 0.7314, 0.8, 0.9, 1.0, 1.2, 1.5, 2.0]:
        write(os.path.join(OUT, "h2_scan", f"h2_{r}.json"),
              table("H2", h2(r), [0, 1], 2, f"H-H {r} A"))
    for r in [1.2, 1.4, 1.5065, 1.7, 2.0]:
        write(os.path.join(OUT, "lih_scan", f"lih_{r}.json"),
              table("LiH", lih(r), [0, 1, 2], 4, f"Li-H {r} A"))
    write(os.path.join(OUT, "h2o_1.0812.json"),
          table("H2O", h2o(1.0812), [1, 2, 3, 4, 5, 6], 8,
                "O-H 1.0812 A, H-O-H 104.5 deg, O 1s frozen"))
    write(os.path.join(OUT, "nh3_0.4033.json"),
          table("NH3", nh3(0.4033), [1, 2, 3, 4, 5, 6, 7], 8,
                "N to H3-plane 0.4033 A, H ring radius 0.98 A, N 1s frozen"))


if __name__ == "__main__":
    sys.exit(main())
