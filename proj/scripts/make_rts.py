#!/usr/bin/env python3
"""Writes the bundled RTS-79 / RTS-96 case and modification files.

Network and load data are the standard IEEE reliability test system tables
(branch reactance in pu on 100 MVA, continuous rating as the flow limit).
Unit operating data (ramps, minimum up/down times, cost curves, start-up
steps) are reconstructed per unit type and flagged as such in the output.

Usage: python3 scripts/make_rts.py [out_dir]   (default: data/cases)
"""
import json
import os
import sys

# from, to, reactance_pu, rating_MW
BRANCHES = [
    (1, 2, 0.0139, 175), (1, 3, 0.2112, 175), (1, 5, 0.0845, 175), (2, 4, 0.1267, 175),
    (2, 6, 0.1920, 175), (3, 9, 0.1190, 175), (3, 24, 0.0839, 400), (4, 9, 0.1037, 175),
    (5, 10, 0.0883, 175), (6, 10, 0.0605, 175), (7, 8, 0.0614, 175), (8, 9, 0.1651, 175),
    (8, 10, 0.1651, 175), (9, 11, 0.0839, 400), (9, 12, 0.0839, 400), (10, 11, 0.0839, 400),
    (10, 12, 0.0839, 400), (11, 13, 0.0476, 500), (11, 14, 0.0418, 500), (12, 13, 0.0476, 500),
    (12, 23, 0.0966, 500), (13, 23, 0.0865, 500), (14, 16, 0.0389, 500), (15, 16, 0.0173, 500),
    (15, 21, 0.0490, 500), (15, 21, 0.0490, 500), (15, 24, 0.0519, 500), (16, 17, 0.0259, 500),
    (16, 19, 0.0231, 500), (17, 18, 0.0144, 500), (17, 22, 0.1053, 500), (18, 21, 0.0259, 500),
    (18, 21, 0.0259, 500), (19, 20, 0.0396, 500), (19, 20, 0.0396, 500), (20, 23, 0.0216, 500),
    (20, 23, 0.0216, 500), (21, 22, 0.0678, 500),
]

LOADS = {1: 108, 2: 97, 3: 180, 4: 74, 5: 71, 6: 136, 7: 125, 8: 171, 9: 175, 10: 195,
         13: 265, 14: 194, 15: 317, 16: 100, 18: 333, 19: 181, 20: 128}

# type: p_min, p_max, ramp MW/h, min_up, min_down, no_load $/h, segments [(up_to, $/MWh)],
#       start-up steps [(off_hours, $)], note
UNIT_TYPES = {
    "U12": (2.4, 12, 60, 2, 2, 86.4, [(6, 56.6), (12, 60.2)], [(0, 70), (4, 140)], "oil steam"),
    "U20": (16, 20, 180, 1, 1, 400.7, [(18, 130.0), (20, 132.4)], [(0, 50), (2, 80)], "oil combustion turbine"),
    "U50": (10, 50, 3000, 1, 1, 0.0, [(50, 0.5)], [(0, 0)], "hydro"),
    "U76": (15.2, 76, 120, 8, 4, 212.3, [(45, 16.2), (76, 17.8)], [(0, 715), (8, 1430)], "coal steam"),
    "U100": (25, 100, 420, 8, 8, 781.5, [(60, 43.7), (100, 46.9)], [(0, 575), (8, 1150)], "oil steam"),
    "U155": (54.3, 155, 180, 8, 8, 382.2, [(100, 12.4), (155, 13.6)], [(0, 312), (10, 624)], "coal steam"),
    "U197": (69, 197, 180, 12, 10, 832.8, [(130, 41.6), (197, 43.7)], [(0, 1016), (12, 2032)], "oil steam"),
    "U350": (140, 350, 240, 24, 48, 665.1, [(245, 11.9), (350, 12.9)], [(0, 2298), (24, 4596)], "coal steam"),
    "U400": (100, 400, 1200, 24, 24, 395.4, [(280, 4.4), (400, 4.6)], [(0, 0), (24, 0)], "nuclear"),
}

UNITS = [  # bus, type
    (1, "U20"), (1, "U20"), (1, "U76"), (1, "U76"),
    (2, "U20"), (2, "U20"), (2, "U76"), (2, "U76"),
    (7, "U100"), (7, "U100"), (7, "U100"),
    (13, "U197"), (13, "U197"), (13, "U197"),
    (15, "U12"), (15, "U12"), (15, "U12"), (15, "U12"), (15, "U12"), (15, "U155"),
    (16, "U155"),
    (18, "U400"),
    (21, "U400"),
    (22, "U50"), (22, "U50"), (22, "U50"), (22, "U50"), (22, "U50"), (22, "U50"),
    (23, "U155"), (23, "U155"), (23, "U350"),
]

# Wind farms added to the base system: bus, capacity
WIND = [(3, 200), (14, 200), (19, 200)]

REFERENCE_BUS = 13


def zone_case(offset):
    buses, lines, gens, wind = [], [], [], []
    for b in range(1, 25):
        buses.append({"id": offset + b, "peak_load_MW": float(LOADS.get(b, 0)), "load_profile_id": 0})
    for i, (f, t, x, r) in enumerate(BRANCHES, 1):
        lines.append({"from_bus": offset + f, "to_bus": offset + t, "reactance_pu": x, "flow_limit_MW": float(r)})
    for bus, kind in UNITS:
        pmin, pmax, ramp, ut, dt, nl, seg, su, _ = UNIT_TYPES[kind]
        gens.append({
            "bus": offset + bus, "type": kind, "p_min_MW": pmin, "p_max_MW": float(pmax),
            "ramp_up_MW_per_h": float(min(ramp, 60 * pmax)), "ramp_down_MW_per_h": float(min(ramp, 60 * pmax)),
            "min_up_h": ut, "min_down_h": dt, "no_load_cost": nl,
            "cost_curve": [{"up_to_MW": float(u), "price": p} for u, p in seg],
            "startup_cost_fn": [{"off_hours": h, "cost": float(c)} for h, c in su],
        })
    for bus, cap in WIND:
        wind.append({"bus": offset + bus, "capacity_MW": float(cap)})
    return buses, lines, gens, wind


def number(items):
    for i, it in enumerate(items, 1):
        it["id"] = i
        yield it


def render(name, comment, buses, lines, gens, wind, refs):
    out = [f"// {line}" for line in comment]
    out.append("{")
    out.append(f'  "name": "{name}",')
    out.append('  "base_mva": 100.0,')
    out.append('  "buses": [')
    out.append(",\n".join("    " + json.dumps(b) for b in buses))
    out.append("  ],")
    out.append('  "lines": [')
    out.append(",\n".join("    " + json.dumps(l) for l in lines))
    out.append("  ],")
    out.append("  // Unit data reconstructed per type (see the unit_type field):")
    for kind, v in UNIT_TYPES.items():
        out.append(f"  //   {kind}: {v[8]}; ramps, min up/down, cost curve and start-up steps reconstructed")
    out.append('  "dispatchable_generators": [')
    rows = []
    for g in gens:
        g = dict(g)
        kind = g.pop("type")
        rows.append("    " + json.dumps({"id": g.pop("id"), "unit_type": kind, **g}))
    out.append(",\n".join(rows))
    out.append("  ],")
    out.append('  "wind_generators": [')
    out.append(",\n".join("    " + json.dumps(w) for w in wind))
    out.append("  ],")
    out.append(f'  "reference_buses": {json.dumps(refs)},')
    out.append('  "prices": {"voll": 1000.0, "wind_curtail_price": 100.0}')
    out.append("}")
    return "\n".join(out) + "\n"


def rts79():
    b, l, g, w = zone_case(0)
    return render("rts79", ["IEEE RTS-79 single area: 24 buses, 38 lines, 32 units, 3 added wind farms."],
                  b, list(number(l)), list(number(g)), list(number(w)), [REFERENCE_BUS])


# Inter-area ties: (from, to, reactance, rating). 118 links the added bus 325
# into area C; 119 and 120 tie areas C-A and B-C.
TIES = [(107, 203, 0.161, 175), (113, 215, 0.075, 500), (123, 217, 0.074, 500),
        (323, 325, 0.009, 722), (121, 325, 0.068, 500), (223, 318, 0.161, 175)]


def rts96():
    buses, lines, gens, wind = [], [], [], []
    for offset in (100, 200, 300):
        b, l, g, w = zone_case(offset)
        buses += b
        lines += l
        gens += g
        wind += w
    buses.append({"id": 325, "peak_load_MW": 0.0, "load_profile_id": 0})
    for f, t, x, r in TIES:
        lines.append({"from_bus": f, "to_bus": t, "reactance_pu": x, "flow_limit_MW": float(r)})
    comment = [
        "IEEE RTS-96 three-area system: 73 buses, 120 lines.",
        "Lines 1-38, 39-76 and 77-114 are areas A, B and C in RTS-79 order; 115-120 are the ties.",
        "Assumed mapping of the three interconnection lines used for maintenance: 115 (107-203),",
        "119 (121-325) and 120 (223-318), one per area pair.",
    ]
    return render("rts96", comment, buses, list(number(lines)), list(number(gens)), list(number(wind)),
                  [100 + REFERENCE_BUS])


def bottleneck_mods(offsets, first_line_ids):
    mods = []
    for off, lid in zip(offsets, first_line_ids):
        mods.append({"kind": "remove_line", "args": {"line": lid}})
        mods.append({"kind": "move_load", "args": {"from_bus": off + 1, "to_bus": off + 3}})
        mods.append({"kind": "move_load", "args": {"from_bus": off + 2, "to_bus": off + 4}})
    return json.dumps(mods, indent=2) + "\n"


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join("data", "cases")
    os.makedirs(out, exist_ok=True)
    files = {
        "rts79.case": rts79(),
        "rts96.case": rts96(),
        "rts79-bottleneck.mods": bottleneck_mods([0], [1]),
        "rts96-bottleneck.mods": bottleneck_mods([100, 200, 300], [1, 39, 77]),
    }
    for name, text in files.items():
        with open(os.path.join(out, name), "w") as f:
            f.write(text)
        print(os.path.join(out, name))


if __name__ == "__main__":
    main()
