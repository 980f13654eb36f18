#!/usr/bin/env python3
#
# Project beflow - Copyright 2026 The beflow Authors.
# SPDX-License-Identifier: Apache-2.0
#
"""Write the synthetic elementary-step corpus used by the toy training run.

Every step is a hand-written arrow-pushing template with all heavy atoms
and every moving hydrogen mapped. Each mechanism ends with an identity step
(tag E) whose products equal its reactants.
"""

import argparse
import itertools
import re
import sys


class Maps:
    def __init__(self):
        self.ids = {}

    def __call__(self, key):
        if key not in self.ids:
            self.ids[key] = len(self.ids) + 1
        return self.ids[key]


def fill(template, maps, prefix):
    """Replace {name} placeholders by map numbers; {h} is shared."""

    def sub(m):
        name = m.group(1)
        return str(maps(name if name == "h" else prefix + name))

    return re.sub(r"\{(\w+)\}", sub, template)


# name: (base form, acid form with the moving hydrogen {h}, pKa of acid form)
SPECIES = {
    "water": ("[OH-:{o}]", "[OH:{o}][H:{h}]", 15.7),
    "methanol": ("[CH3:{c}][O-:{o}]", "[CH3:{c}][O:{o}][H:{h}]", 15.5),
    "ethanol": ("[CH3:{d}][CH2:{c}][O-:{o}]",
                "[CH3:{d}][CH2:{c}][O:{o}][H:{h}]", 16.0),
    "ammonia": ("[NH2-:{n}]", "[NH2:{n}][H:{h}]", 38.0),
    "ammonium": ("[NH3:{n}]", "[NH3+:{n}][H:{h}]", 9.25),
    "hcn": ("[C-:{c}]#[N:{n}]", "[H:{h}][C:{c}]#[N:{n}]", 9.2),
    "acetic": ("[CH3:{d}][C:{c}](=[O:{p}])[O-:{o}]",
               "[CH3:{d}][C:{c}](=[O:{p}])[O:{o}][H:{h}]", 4.76),
    "hcl": ("[Cl-:{x}]", "[Cl:{x}][H:{h}]", -7.0),
    "phenol": ("[O-:{o}][c:{a}]1[cH:{b}][cH:{c}][cH:{d}][cH:{e}][cH:{f}]1",
               "[H:{h}][O:{o}][c:{a}]1[cH:{b}][cH:{c}][cH:{d}][cH:{e}]"
               "[cH:{f}]1", 10.0),
}

PT_ACIDS = ["acetic", "hcl", "hcn", "phenol", "methanol", "water"]
PT_BASES = ["water", "methanol", "ammonia", "ammonium", "acetic"]

# Nucleophile: (anion, attached form starting at the attacking atom)
NUCLEOPHILES = {
    "hydroxide": ("[OH-:{o}]", "[OH:{o}]"),
    "methoxide": ("[CH3:{c}][O-:{o}]", "[O:{o}][CH3:{c}]"),
    "ethoxide": ("[CH3:{d}][CH2:{c}][O-:{o}]", "[O:{o}][CH2:{c}][CH3:{d}]"),
    "cyanide": ("[C-:{c}]#[N:{n}]", "[C:{c}]#[N:{n}]"),
    "hydrosulfide": ("[SH-:{s}]", "[SH:{s}]"),
}

# Alkyl groups written so that the last atom is the electrophilic carbon.
ALKYLS = {
    "methyl": "[CH3:{a}]",
    "ethyl": "[CH3:{b}][CH2:{a}]",
    "propyl": "[CH3:{c}][CH2:{b}][CH2:{a}]",
}

HALIDES = {"Cl": ("[Cl:{x}]", "[Cl-:{x}]"), "Br": ("[Br:{x}]", "[Br-:{x}]"),
           "I": ("[I:{x}]", "[I-:{x}]")}

# Carbonyls: (carbonyl, adduct with {NU} at the former carbonyl carbon, the
# oxygen written as an alkoxide, alcohol form of the adduct)
CARBONYLS = {
    "formaldehyde": ("[CH2:{c}]=[O:{o}]", "[O-:{o}][CH2:{c}]{NU}",
                     "[H:{h}][O:{o}][CH2:{c}]{NU}"),
    "acetaldehyde": ("[CH3:{m}][CH:{c}]=[O:{o}]",
                     "[CH3:{m}][CH:{c}]([O-:{o}]){NU}",
                     "[CH3:{m}][CH:{c}]([O:{o}][H:{h}]){NU}"),
    "acetone": ("[CH3:{m}][C:{c}](=[O:{o}])[CH3:{n}]",
                "[CH3:{m}][C:{c}]([O-:{o}])([CH3:{n}]){NU}",
                "[CH3:{m}][C:{c}]([O:{o}][H:{h}])([CH3:{n}]){NU}"),
    "propanal": ("[CH3:{n}][CH2:{m}][CH:{c}]=[O:{o}]",
                 "[CH3:{n}][CH2:{m}][CH:{c}]([O-:{o}]){NU}",
                 "[CH3:{n}][CH2:{m}][CH:{c}]([O:{o}][H:{h}]){NU}"),
}

# Esters: acyl part ending at the carbonyl carbon, alkoxy leaving group.
ESTER_ACYLS = {"acetate": "[CH3:{r}]", "formate": "", "propanoate":
               "[CH3:{s}][CH2:{r}]"}
ESTER_ALKOXY = {"methyl": ("[O:{q}][CH3:{k}]", "[O-:{q}][CH3:{k}]",
                           "[H:{h}][O:{q}][CH3:{k}]"),
                "ethyl": ("[O:{q}][CH2:{k}][CH3:{l}]",
                          "[O-:{q}][CH2:{k}][CH3:{l}]",
                          "[H:{h}][O:{q}][CH2:{k}][CH3:{l}]")}


def join(*parts):
    return ".".join(p for p in parts if p)


def mechanism(states):
    """Consecutive states as steps, closed by an identity step."""
    steps = [(a, b, "") for a, b in zip(states, states[1:])]
    steps.append((states[-1], states[-1], "E"))
    return steps


def proton_transfers():
    out = []
    for acid, base in itertools.product(PT_ACIDS, PT_BASES):
        if acid == base or SPECIES[acid][2] + 2.0 > SPECIES[base][2]:
            continue
        m = Maps()
        a_base, a_acid, _ = SPECIES[acid]
        b_base, b_acid, _ = SPECIES[base]
        states = [join(fill(a_acid, m, "A"), fill(b_base, m, "B")),
                  join(fill(a_base, m, "A"), fill(b_acid, m, "B"))]
        out.append((f"pt_{acid}_{base}", mechanism(states), "proton"))
    return out


def sn2():
    out = []
    for nu, alkyl, hal in itertools.product(
            ["hydroxide", "methoxide", "ethoxide", "cyanide", "hydrosulfide"],
            ["methyl", "ethyl"], ["Cl", "Br", "I"]):
        m = Maps()
        anion, attached = NUCLEOPHILES[nu]
        r = ALKYLS[alkyl]
        bound, free = HALIDES[hal]
        states = [join(fill(anion, m, "N"), fill(r + bound, m, "S")),
                  join(fill(r, m, "S") + fill(attached, m, "N"),
                       fill(free, m, "S"))]
        out.append((f"sn2_{nu}_{alkyl}{hal.lower()}", mechanism(states),
                    "sn2"))
    return out


def e2():
    out = []
    sub = "[CH3:{m}][C:{b}]([H:{h}])([CH3:{n}])[CH2:{a}]"
    alkene = "[CH3:{m}][C:{b}]([CH3:{n}])=[CH2:{a}]"
    for base, hal in itertools.product(["water", "methanol", "ethanol"],
                                       ["Cl", "Br", "I"]):
        m = Maps()
        b_base, b_acid, _ = SPECIES[base]
        bound, free = HALIDES[hal]
        states = [join(fill(b_base, m, "B"), fill(sub + bound, m, "S")),
                  join(fill(alkene, m, "S"), fill(b_acid, m, "B"),
                       fill(free, m, "S"))]
        out.append((f"e2_{base}_isobutyl{hal.lower()}", mechanism(states),
                    "e2"))
    return out


def williamson():
    out = []
    alcohols = {"methanol": "methyl", "ethanol": "ethyl", "propanol": "propyl"}
    for alcohol, (alkyl, hal) in itertools.product(
            alcohols, [("methyl", "I"), ("methyl", "Br"), ("ethyl", "Br")]):
        m = Maps()
        r = ALKYLS[alcohols[alcohol]]
        e = ALKYLS[alkyl]
        bound, free = HALIDES[hal]
        halide = fill(e + bound, m, "E")
        states = [
            join(fill(r + "[O:{o}][H:{h}]", m, "R"), "[NH2-:%d]" % m("Nn"),
                 halide),
            join(fill(r + "[O-:{o}]", m, "R"),
                 "[NH2:%d][H:%d]" % (m("Nn"), m("h")), halide),
            join(fill(r + "[O:{o}]", m, "R") + ether_tail(e, m),
                 "[NH2:%d][H:%d]" % (m("Nn"), m("h")), fill(free, m, "E")),
        ]
        out.append((f"williamson_{alcohol}_{alkyl}{hal.lower()}",
                    mechanism(states), "williamson"))
    return out


def ether_tail(alkyl_template, m):
    """Alkyl group written from its attachment carbon outward."""
    atoms = re.findall(r"\[[^\]]+\]", alkyl_template)
    return fill("".join(reversed(atoms)), m, "E")


def with_nu(template, nu_bound, m):
    head, tail = template.split("{NU}")
    return fill(head, m, "C") + nu_bound + fill(tail, m, "C")


def carbonyl_additions():
    out = []
    for nu, carbonyl in itertools.product(
            ["cyanide", "methoxide", "ethoxide", "hydrosulfide"], CARBONYLS):
        m = Maps()
        anion, attached = NUCLEOPHILES[nu]
        c, adduct, alcohol = CARBONYLS[carbonyl]
        nu_bound = "(" + fill(attached, m, "N") + ")"
        proton = "[CH3:{k}][O:{q}][H:{h}]"
        spent = "[CH3:{k}][O-:{q}]"
        states = [
            join(fill(anion, m, "N"), fill(c, m, "C"), fill(proton, m, "P")),
            join(with_nu(adduct, nu_bound, m), fill(proton, m, "P")),
            join(with_nu(alcohol, nu_bound, m), fill(spent, m, "P")),
        ]
        out.append((f"addition_{nu}_{carbonyl}", mechanism(states),
                    "addition"))
    return out


def saponifications():
    out = []
    for acyl, alkoxy in itertools.product(ESTER_ACYLS, ESTER_ALKOXY):
        m = Maps()
        a = ESTER_ACYLS[acyl]
        bound, leaving, alcohol = ESTER_ALKOXY[alkoxy]
        ch = "[C:{c}]" if a else "[CH:{c}]"
        states = [
            join(fill("[O-:{w}][H:{h}]", m, "T"),
                 fill(a + ch + "(=[O:{o}])" + bound, m, "T")),
            fill(a + ch + "([O-:{o}])([O:{w}][H:{h}])" + bound, m, "T"),
            join(fill(a + ch + "(=[O:{o}])[O:{w}][H:{h}]", m, "T"),
                 fill(leaving, m, "T")),
            join(fill(a + ch + "(=[O:{o}])[O-:{w}]", m, "T"),
                 fill(alcohol, m, "T")),
        ]
        out.append((f"saponification_{alkoxy}{acyl}", mechanism(states),
                    "saponification"))
    return out


def branching():
    sub = ("[CH3:{e}][CH2:{f}][C:{b}]([H:{h}])([CH3:{m}])[CH2:{a}]"
           "[Br:{x}]")
    sn2_product = ("[CH3:{e}][CH2:{f}][C:{b}]([H:{h}])([CH3:{m}])"
                   "[CH2:{a}][OH:{o}]")
    alkene = "[CH3:{e}][CH2:{f}][C:{b}]([CH3:{m}])=[CH2:{a}]"
    out = []
    m = Maps()
    start = join("[OH-:%d]" % m("So"), fill(sub, m, "S"))
    out.append(("branch_substitution", mechanism(
        [start, join(fill(sn2_product, m, "S"), "[Br-:%d]" % m("Sx"))]),
        "branch"))
    out.append(("branch_elimination", mechanism(
        [start, join(fill(alkene, m, "S"),
                     "[OH:%d][H:%d]" % (m("So"), m("h")),
                     "[Br-:%d]" % m("Sx"))]), "branch"))
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("-o", "--output", default="-")
    args = p.parse_args()

    reactions = (proton_transfers() + sn2() + e2() + williamson()
                 + carbonyl_additions() + saponifications() + branching())
    lines = ["# reaction_id\tstep_index\trxn_smiles\ttag"]
    for rid, steps, family in reactions:
        for k, (lhs, rhs, tag) in enumerate(steps, start=1):
            lines.append(f"{rid}\t{k}\t{lhs}>>{rhs}\t{tag or family}")
    text = "\n".join(lines) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as f:
            f.write(text)
    sys.stderr.write(f"{len(reactions)} reactions, {len(lines) - 1} steps\n")


if __name__ == "__main__":
    main()
