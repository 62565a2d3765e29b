#!/usr/bin/env python3
"""Rebuild the raw-input half of the bundled dataset.

The published parameter tables (supply.csv, interception.csv, yield.csv,
barriers.csv) are the authoritative part of data/bundled/. The raw inputs the
estimators consume (countries.csv, migration.csv, distance_km.csv) are not
public in matching form, so this script back-solves a consistent set:

  * sec_fraction = SEC_BASE + SEC_SLOPE * I_j
  * gdp_usd      = GDP_BASE + GDP_SLOPE * |Y_j|
  * survey fractions and Muslim population are solved from the supply table
    and its high/low-commitment sensitivities; rows with identical
    sensitivities are left blank so that regional imputation fills them
  * migrants     = p_i * p_j / d_ij^2 / (BARRIER_BASE + BARRIER_SLOPE * T_ij)

Populations and city coordinates are rounded public figures.

Usage: python3 data/reconstruct_raw.py [data/bundled]
"""

import csv
import math
import sys
from pathlib import Path

Q = 0.002
SEC_BASE, SEC_SLOPE = 0.010, 0.005
GDP_BASE, GDP_SLOPE = 5.0e10, 2.6e11
BARRIER_BASE, BARRIER_SLOPE = 50.0, 500.0

# code: (name, region, population, lat, lon)
COUNTRIES = {
    "AFG": ("Afghanistan", "mena", 27.2e6, 34.53, 69.17),
    "DZA": ("Algeria", "mena", 34.4e6, 36.75, 3.06),
    "AZE": ("Azerbaijan", "central_asia", 8.7e6, 40.41, 49.87),
    "BGD": ("Bangladesh", "south_asia", 160.0e6, 23.81, 90.41),
    "BFA": ("Burkina Faso", "west_africa", 15.2e6, 12.37, -1.52),
    "TCD": ("Chad", "central_africa", 11.1e6, 12.13, 15.06),
    "CIV": ("Cote d'Ivoire", "west_africa", 20.6e6, 5.36, -4.01),
    "EGY": ("Egypt", "mena", 81.5e6, 30.04, 31.24),
    "GIN": ("Guinea", "west_africa", 9.8e6, 9.64, -13.58),
    "IND": ("India", "asia_pacific", 1181.4e6, 28.61, 77.21),
    "IDN": ("Indonesia", "asia_pacific", 227.3e6, -6.21, 106.85),
    "IRN": ("Iran", "mena", 72.0e6, 35.69, 51.39),
    "IRQ": ("Iraq", "mena", 30.1e6, 33.31, 44.37),
    "JOR": ("Jordan", "mena", 6.1e6, 31.95, 35.93),
    "KAZ": ("Kazakhstan", "central_asia", 15.7e6, 43.24, 76.89),
    "LBY": ("Libya", "mena", 6.3e6, 32.89, 13.19),
    "MYS": ("Malaysia", "asia_pacific", 27.0e6, 3.14, 101.69),
    "MAR": ("Morocco", "mena", 31.6e6, 33.57, -7.59),
    "MOZ": ("Mozambique", "east_africa", 22.4e6, -25.97, 32.57),
    "NGA": ("Nigeria", "west_africa", 151.3e6, 6.52, 3.38),
    "PAK": ("Pakistan", "south_asia", 176.9e6, 24.86, 67.01),
    "PSE": ("Palestine", "levant", 4.0e6, 31.77, 35.21),
    "RUS": ("Russia", "asia_pacific", 141.9e6, 55.76, 37.62),
    "SAU": ("Saudi Arabia", "mena", 25.2e6, 24.71, 46.68),
    "SEN": ("Senegal", "west_africa", 12.2e6, 14.72, -17.47),
    "SOM": ("Somalia", "mena", 8.9e6, 2.05, 45.32),
    "SDN": ("Sudan", "mena", 41.3e6, 15.50, 32.56),
    "TJK": ("Tajikistan", "central_asia", 6.8e6, 38.56, 68.79),
    "TZA": ("Tanzania", "east_africa", 42.5e6, -6.79, 39.21),
    "TUN": ("Tunisia", "mena", 10.3e6, 36.81, 10.18),
    "TUR": ("Turkey", "mena", 73.9e6, 41.01, 28.98),
    "YEM": ("Yemen", "mena", 22.9e6, 15.37, 44.19),
    "ETH": ("Ethiopia", "east_africa", 80.7e6, 9.03, 38.74),
    "MLI": ("Mali", "sahel", 12.7e6, 12.64, -8.00),
    "UZB": ("Uzbekistan", "asia_pacific", 27.3e6, 41.30, 69.24),
    "SYR": ("Syria", "mena", 21.2e6, 33.51, 36.29),
    "CHN": ("China", "asia_pacific", 1325.6e6, 39.90, 116.41),
    "NER": ("Niger", "west_africa", 14.7e6, 13.51, 2.11),
    "LBN": ("Lebanon", "mena", 4.2e6, 33.89, 35.50),
    "GHA": ("Ghana", "west_africa", 23.4e6, 5.60, -0.19),
    "PHL": ("Philippines", "asia_pacific", 90.3e6, 14.60, 120.98),
    # targets
    "AUS": ("Australia", "oceania", 21.4e6, -33.87, 151.21),
    "AUT": ("Austria", "europe", 8.3e6, 48.21, 16.37),
    "BEL": ("Belgium", "europe", 10.7e6, 50.85, 4.35),
    "CAN": ("Canada", "north_america", 33.3e6, 43.65, -79.38),
    "CZE": ("Czech Republic", "europe", 10.4e6, 50.08, 14.44),
    "DNK": ("Denmark", "europe", 5.5e6, 55.68, 12.57),
    "EST": ("Estonia", "europe", 1.34e6, 59.44, 24.75),
    "FIN": ("Finland", "europe", 5.3e6, 60.17, 24.94),
    "FRA": ("France", "europe", 62.1e6, 48.86, 2.35),
    "DEU": ("Germany", "europe", 82.1e6, 52.52, 13.40),
    "GRC": ("Greece", "europe", 11.2e6, 37.98, 23.73),
    "HUN": ("Hungary", "europe", 10.0e6, 47.50, 19.04),
    "ISL": ("Iceland", "europe", 0.32e6, 64.15, -21.94),
    "IRL": ("Ireland", "europe", 4.4e6, 53.35, -6.26),
    "ISR": ("Israel", "mena_oecd", 7.3e6, 32.09, 34.78),
    "ITA": ("Italy", "europe", 59.6e6, 41.90, 12.50),
    "JPN": ("Japan", "east_asia", 127.7e6, 35.68, 139.69),
    "KOR": ("South Korea", "east_asia", 48.2e6, 37.57, 126.98),
    "LUX": ("Luxembourg", "europe", 0.49e6, 49.61, 6.13),
    "NLD": ("Netherlands", "europe", 16.4e6, 52.37, 4.90),
    "NZL": ("New Zealand", "oceania", 4.3e6, -41.29, 174.78),
    "NOR": ("Norway", "europe", 4.8e6, 59.91, 10.75),
    "POL": ("Poland", "europe", 38.1e6, 52.23, 21.01),
    "PRT": ("Portugal", "europe", 10.6e6, 38.72, -9.14),
    "SVK": ("Slovakia", "europe", 5.4e6, 48.15, 17.11),
    "SVN": ("Slovenia", "europe", 2.0e6, 46.06, 14.51),
    "ESP": ("Spain", "europe", 45.6e6, 40.42, -3.70),
    "SWE": ("Sweden", "europe", 9.2e6, 59.33, 18.07),
    "GBR": ("United Kingdom", "europe", 61.4e6, 51.51, -0.13),
    "USA": ("United States", "north_america", 304.1e6, 40.71, -74.01),
}

# Muslim population for surveyed countries (persons).
SURVEYED_MUSLIM_POP = {
    "IDN": 202_867_000, "NGA": 78_056_000, "BGD": 145_312_000,
    "EGY": 78_513_000, "PAK": 174_082_000, "ETH": 28_063_000,
    "MLI": 12_040_000, "MAR": 31_993_000, "MYS": 16_581_000,
    "TUR": 73_619_000, "PSE": 4_298_000, "SEN": 12_028_000,
}

# Explicit (rarely, sometimes, often) where the default split is not used.
EXPLICIT_SURVEY = {"IDN": (0.14, 0.13, 0.03)}

# region -> (free balancing member, its Muslim population, anchor country
#            whose published row fixes the regional mean level)
IMPUTED_REGIONS = {
    "mena": ("LBN", 2_504_000, "IRN", 73_777_000),
    "west_africa": ("GHA", 3_906_000, "NER", 15_075_000),
    "asia_pacific": ("PHL", 4_654_000, "IND", 160_945_000),
}

# Sensitivities (percent change, high commitment / low commitment).
SENSITIVITY = {
    "IDN": (-46.2, 24.6), "NGA": (-33.3, 17.8), "IND": (-43.1, 23.0),
    "BGD": (-33.8, 18.0), "IRN": (-30.6, 16.3), "EGY": (-41.0, 21.8),
    "PAK": (-22.1, 11.8), "ETH": (-39.7, 21.2), "MLI": (-23.2, 12.4),
    "MAR": (-26.5, 14.1), "NER": (-32.2, 17.2), "MYS": (-47.7, 25.4),
    "TUR": (-44.0, 23.5), "PSE": (-21.1, 11.2), "SEN": (-40.3, 21.5),
}


def read_map(path, key, value):
    with open(path, newline="") as f:
        return {row[key]: row[value] for row in csv.DictReader(f)}


def split_survey(d, high_pct):
    """(rarely, sometimes, often) with weighted total d and given sensitivity.

    With default weights (0.25, 0.5, 1) and high-commitment (0.1, 0.2, 1), the
    non-"often" part u = 0.25r + 0.5s satisfies 0.6u/d = -high/100.
    """
    u = d * (-high_pct / 100.0) / 0.6
    s = u / 0.75
    return (s, s, d - u)


def weighted(t):
    return 0.25 * t[0] + 0.5 * t[1] + t[2]


def haversine_km(a, b):
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    h = (math.sin((lat2 - lat1) / 2) ** 2
         + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2) ** 2)
    return 2 * 6371.0 * math.asin(math.sqrt(h))


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).parent / "bundled")
    supply = {k: float(v) for k, v in read_map(root / "supply.csv", "code", "supply").items()}
    interception = {k: float(v) for k, v in read_map(root / "interception.csv", "code", "cost").items()}
    yields = {k: float(v) for k, v in read_map(root / "yield.csv", "code", "yield").items()}
    with open(root / "barriers.csv", newline="") as f:
        barriers = [(r["origin"], r["dest"], float(r["cost"])) for r in csv.DictReader(f)]

    survey = {}
    muslim = {}
    for code, j in SURVEYED_MUSLIM_POP.items():
        if code in EXPLICIT_SURVEY:
            sig = EXPLICIT_SURVEY[code]
        else:
            d = supply.get(code, 0.0) / (Q * j)
            sig = tuple(round(x, 4) for x in split_survey(d, SENSITIVITY[code][0]))
        survey[code] = sig
        if code in EXPLICIT_SURVEY:
            muslim[code] = j
        else:
            muslim[code] = round(supply[code] / (Q * weighted(sig)))

    for region, (free, free_j, anchor, anchor_j) in IMPUTED_REGIONS.items():
        d = supply[anchor] / (Q * anchor_j)
        target = split_survey(d, SENSITIVITY[anchor][0])
        members = [c for c in survey if COUNTRIES[c][1] == region]
        n = len(members) + 1
        sig = tuple(round(n * target[k] - sum(survey[c][k] for c in members), 6) for k in range(3))
        if min(sig) < 0 or sum(sig) > 1:
            raise SystemExit(f"{region}: balancing member {free} infeasible: {sig}")
        survey[free] = sig
        muslim[free] = free_j
        members.append(free)
        mean = tuple(sum(survey[c][k] for c in members) / len(members) for k in range(3))
        for code in supply:
            if COUNTRIES[code][1] == region and code not in survey:
                muslim[code] = round(supply[code] / (Q * weighted(mean)))
        s_free = Q * free_j * weighted(sig)
        print(f"{region}: balancing {free} sigma={sig} supply={s_free:.1f}", file=sys.stderr)

    missing = [c for c in supply if c not in muslim]
    if missing:
        raise SystemExit(f"no survey route for {missing}")

    with open(root / "countries.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["code", "name", "region", "population", "gdp_usd", "sec_fraction",
                    "muslim_pop", "sigma_n", "sigma_r", "sigma_s", "sigma_o",
                    "is_oecd", "is_target"])
        for code in sorted(COUNTRIES):
            name, region, pop, _, _ = COUNTRIES[code]
            is_target = code in interception
            gdp = f"{GDP_BASE + GDP_SLOPE * abs(yields[code]):.6g}" if code in yields else ""
            sec = f"{SEC_BASE + SEC_SLOPE * interception[code]:.6g}" if is_target else ""
            j = str(muslim[code]) if code in muslim else ""
            if code in survey:
                r, s, o = survey[code]
                never = round(max(0.0, 0.95 - r - s - o), 6)
                sig = [f"{never:g}", f"{r:g}", f"{s:g}", f"{o:g}"]
            else:
                sig = ["", "", "", ""]
            w.writerow([code, name, region, f"{pop:.6g}", gdp, sec, j, *sig,
                        int(is_target), int(is_target)])

    pairs = {}
    with open(root / "migration.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["origin", "dest", "value"])
        for o, d, t in barriers:
            if o == d or t >= 1e100:
                continue
            km = haversine_km(COUNTRIES[o][3:5], COUNTRIES[d][3:5])
            pairs[tuple(sorted((o, d)))] = km
            gravity = COUNTRIES[o][2] * COUNTRIES[d][2] / km ** 2
            w.writerow([o, d, f"{gravity / (BARRIER_BASE + BARRIER_SLOPE * t):.10g}"])

    with open(root / "distance_km.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["origin", "dest", "value"])
        for (a, b), km in sorted(pairs.items()):
            w.writerow([a, b, f"{km:.10g}"])


if __name__ == "__main__":
    main()
