"""The contraction SU_mu(2) -> Etilde_kappa(2), step by step.

    python scripts/run_contraction.py [--order 2] [--deg 4]
"""
import argparse

from ekappa.catalog import default_catalog
from ekappa.contract import (
    ContractionMap,
    check_counit_compatibility,
    check_star_equivariance,
    contract_ideal_from_catalog,
    expand_forms,
    printed_relations,
    verify_limit_algebra,
)

p = argparse.ArgumentParser()
p.add_argument("--order", type=int, default=2)
p.add_argument("--deg", type=int, default=4)
args = p.parse_args()

cat = default_catalog(args.order)
cm = ContractionMap.from_catalog(cat, args.order)

print("generator images (series in t = 1/R):")
for j, img in sorted(cm.images.items()):
    print(f"  {cm.source.alphabet.names[j]:3s} -> {img.to_text()}")

rep = verify_limit_algebra(cm, printed_relations(cat), orders=1)
print(f"\nlimit algebra: {rep.passed}/{len(rep.residues)} residues vanish")
for rel, k, r in rep.residues:
    print(f"  t^{k}  {rel:30s} {r}")
print(f"star carried over: {check_star_equivariance(cm).ok}; counit carried over: {check_counit_compatibility(cm).ok}")

print("\nideal contractions (exact lattice):")
for which in ("3D", "4D+", "4D-"):
    r = contract_ideal_from_catalog(which, args.deg, cat, cm=cm)
    print(f"  {which:4s} limit dim {r.limit_dim}, claimed dim {r.claimed_dim}, ok={r.ok} ({r.saturation_steps} saturation steps)")
    for s in r.naive:
        if s.member is False or s.divergent:
            print(f"       naive scale {s.scale} of {s.element}: {s.value} (not in the claimed span)")

fr = expand_forms(cm, cat)
print("\nforms:")
for name, parts in fr.expansions.items():
    print(f"  {name} = {parts[0]} + t ({parts[1]}) + O(t^2)")
print(f"exterior identities: {fr.source_rank} on SU_mu(2) (closed under star), limit rank {fr.obtained_rank}")
for rel in fr.relations:
    print(f"  {rel} = 0")
