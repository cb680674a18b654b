"""Generate the bundled synthetic datasets in data/.

The files mimic the shape of the MINEM monthly and annual production
tables; the numbers are synthetic. Re-running rewrites identical files.
"""

import argparse
import json
import math
import random
from pathlib import Path

MONTHS = ["Enero", "Febrero", "Marzo", "Abril", "Mayo", "Junio", "Julio", "Agosto",
          "Septiembre", "Octubre", "Noviembre", "Diciembre"]
HEADER = ["Mineral", "Unidad de medida", "Etapa", "Proceso", "Estrato", "Titular",
          "Departamento", "Año"] + MONTHS + ["Total"]

# name, unit, weight, log-scale of a typical monthly quantity
MINERALS = [
    ("COBRE", "TMF", 14, 7.5),
    ("ORO", "KG", 22, 3.0),
    ("ZINC", "TMF", 12, 7.2),
    ("PLATA", "KG", 16, 6.5),
    ("PLOMO", "TMF", 10, 6.3),
    ("ESTAÑO", "TMF", 2, 6.0),
    ("MOLIBDENO", "TMF", 3, 5.2),
    ("CADMIO", "TMF", 2, 1.5),
    ("HIERRO", "TMF", 3, 10.5),
]

# display spelling, weight
DEPARTMENTS = [
    ("Amazonas", 2), ("Áncash", 40), ("Apurímac", 22), ("Arequipa", 60), ("Ayacucho", 30),
    ("Cajamarca", 25), ("Callao", 3), ("Cusco", 25), ("Huancavelica", 20), ("Huánuco", 12),
    ("Ica", 20), ("Junín", 40), ("La Libertad", 50), ("Lambayeque", 3), ("Lima", 60),
    ("Loreto", 2), ("Madre de Dios", 20), ("Moquegua", 10), ("Pasco", 35), ("Piura", 8),
    ("Puno", 40), ("San Martín", 2), ("Tacna", 10), ("Tumbes", 2), ("Ucayali", 2),
]

STAGES = ["CONCENTRACIÓN", "FUNDICIÓN", "REFINACIÓN"]
PROCESSES = ["FLOTACIÓN", "GRAVIMETRÍA", "LIXIVIACIÓN"]
STRATA = ["PEQUEÑO PRODUCTOR", "RÉGIMEN GENERAL"]
HOLDER_WORDS = ["ANDINA", "DEL SUR", "HUASCARÁN", "CONDOR", "SANTA ROSA", "INCA", "LOS ANDES",
                "SAN JUAN", "ATACOCHA", "PACÍFICO", "CORDILLERA", "AURÍFERA", "ILLIMANI", "TORO"]

# Annual anchors (year, quantity) interpolated log-linearly.
ANNUAL = [
    ("COBRE", "TMF", [(1980, 367_000), (1995, 410_000), (2005, 1_010_000), (2015, 1_700_000), (2022, 2_450_000)]),
    ("ORO", "KG", [(1980, 5_000), (1995, 57_000), (2005, 208_000), (2015, 146_000), (2022, 96_000)]),
    ("ZINC", "TMF", [(1980, 488_000), (1995, 690_000), (2005, 1_200_000), (2015, 1_420_000), (2022, 1_370_000)]),
    ("PLATA", "TMF", [(1980, 1_340), (1995, 1_900), (2005, 3_190), (2015, 4_100), (2022, 3_080)]),
    ("PLOMO", "TMF", [(1980, 190_000), (1995, 238_000), (2005, 319_000), (2015, 316_000), (2022, 231_000)]),
    ("ESTAÑO", "TMF", [(1980, 1_080), (1995, 22_000), (2005, 42_000), (2015, 19_500), (2022, 28_000)]),
    ("MOLIBDENO", "TMF", [(1980, 2_600), (1995, 3_600), (2005, 17_300), (2015, 20_200), (2022, 31_600)]),
    ("CADMIO", "TMF", [(1980, 410), (1995, 500), (2005, 650), (2015, 760), (2022, 700)]),
    ("HIERRO", "TMF", [(1980, 3_800_000), (1995, 4_800_000), (2005, 6_100_000), (2015, 7_300_000), (2022, 13_000_000)]),
]


def weighted(rng, items):
    total = sum(w for *_, w in items) if len(items[0]) == 2 else sum(i[2] for i in items)
    x = rng.uniform(0, total)
    for item in items:
        w = item[1] if len(item) == 2 else item[2]
        x -= w
        if x <= 0:
            return item
    return items[-1]


def number(rng, v):
    text = f"{v:.2f}"
    if v >= 1000 and rng.random() < 0.1:
        return '"' + f"{v:,.2f}" + '"'
    return text


def vary(rng, name):
    r = rng.random()
    if r < 0.08:
        return name.lower()
    if r < 0.14:
        return name.title() + " "
    return name


def monthly(rng, rows):
    combos = []
    while len(combos) < rows // 3:
        mineral, unit, _, scale = weighted(rng, MINERALS)
        dept = weighted(rng, DEPARTMENTS)[0]
        combos.append({
            "mineral": mineral, "unit": unit, "dept": dept,
            "stage": rng.choice(STAGES), "process": rng.choice(PROCESSES), "stratum": rng.choice(STRATA),
            "holder": "MINERA " + rng.choice(HOLDER_WORDS) + " " + rng.choice(HOLDER_WORDS) + " S.A.C.",
            "base": math.exp(rng.gauss(scale, 1.0)),
            "growth": rng.gauss(0.0, 0.01),
        })
    # Every department appears at least once.
    seen = {c["dept"] for c in combos}
    missing = [d for d, _ in DEPARTMENTS if d not in seen]
    for i, d in enumerate(missing):
        combos[i * 7]["dept"] = d

    lines = [",".join(HEADER)]
    for year in (2020, 2021, 2022):
        for c in combos:
            t0 = (year - 2020) * 12
            values = []
            for m in range(12):
                season = 1.0 + 0.08 * math.sin(2 * math.pi * (m + 1) / 12)
                v = c["base"] * season * math.exp(c["growth"] * (t0 + m) + rng.gauss(0.0, 0.12))
                values.append(v)
            gaps = [rng.random() < 0.02 for _ in range(12)]
            if all(gaps):
                gaps[0] = False
            cells = ["" if g else number(rng, v) for g, v in zip(gaps, values)]
            total = "" if any(gaps) else number(rng, sum(round(v, 2) for v in values))
            fields = [vary(rng, c["mineral"]), c["unit"], c["stage"], c["process"], c["stratum"],
                      '"' + c["holder"] + '"', vary(rng, c["dept"]), str(year)] + cells + [total]
            lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def interpolate(anchors, year):
    for (y0, v0), (y1, v1) in zip(anchors, anchors[1:]):
        if y0 <= year <= y1:
            t = (year - y0) / (y1 - y0)
            return math.exp(math.log(v0) + t * (math.log(v1) - math.log(v0)))
    raise ValueError(year)


def annual(rng):
    header = ["AÑO"] + [f"{m}({u})" for m, u, _ in ANNUAL]
    noise = {m: 0.0 for m, _, _ in ANNUAL}
    lines = [",".join(header)]
    for year in range(1980, 2023):
        row = [str(year)]
        for m, _, anchors in ANNUAL:
            noise[m] = 0.6 * noise[m] + rng.gauss(0.0, 0.05)
            row.append(f"{interpolate(anchors, year) * math.exp(noise[m]):.2f}")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


# Approximate centroid (lon, lat) and radius in degrees.
CENTROIDS = {
    "AMAZONAS": (-78.0, -5.1, 0.9), "ÁNCASH": (-77.6, -9.4, 0.7), "APURÍMAC": (-73.0, -14.0, 0.6),
    "AREQUIPA": (-72.5, -15.8, 1.1), "AYACUCHO": (-74.2, -13.9, 0.8), "CAJAMARCA": (-78.7, -6.4, 0.8),
    "CALLAO": (-77.12, -12.05, 0.08), "CUSCO": (-72.0, -13.2, 1.1), "HUANCAVELICA": (-75.0, -12.9, 0.5),
    "HUÁNUCO": (-76.0, -9.5, 0.7), "ICA": (-75.5, -14.3, 0.6), "JUNÍN": (-74.9, -11.5, 0.8),
    "LA LIBERTAD": (-78.3, -8.0, 0.8), "LAMBAYEQUE": (-79.8, -6.4, 0.5), "LIMA": (-76.6, -11.8, 0.7),
    "LORETO": (-75.0, -4.2, 2.2), "MADRE DE DIOS": (-70.4, -12.0, 1.1), "MOQUEGUA": (-70.9, -16.9, 0.5),
    "PASCO": (-75.5, -10.4, 0.5), "PIURA": (-80.3, -5.1, 0.7), "PUNO": (-70.0, -14.9, 1.1),
    "SAN MARTÍN": (-76.8, -7.1, 0.8), "TACNA": (-70.3, -17.6, 0.5), "TUMBES": (-80.4, -3.8, 0.3),
    "UCAYALI": (-73.5, -9.6, 1.3),
}


def geo():
    features = []
    for name, (lon, lat, r) in CENTROIDS.items():
        ring = []
        for i in range(8):
            a = 2 * math.pi * i / 8
            ring.append([round(lon + r * math.cos(a), 4), round(lat + r * math.sin(a), 4)])
        ring.append(ring[0])
        features.append({
            "type": "Feature",
            "properties": {"NOMBDEP": name},
            "geometry": {"type": "Polygon", "coordinates": [ring]},
        })
    return json.dumps({"type": "FeatureCollection", "features": features}, ensure_ascii=False, indent=1) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    ap.add_argument("--rows", type=int, default=2151)
    ap.add_argument("--seed", type=int, default=2151)
    args = ap.parse_args()
    if args.rows % 3:
        ap.error("--rows must be a multiple of 3 (one row per combination and year)")
    args.out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    (args.out / "production_monthly.csv").write_text(monthly(rng, args.rows), encoding="utf-8")
    (args.out / "production_annual.csv").write_text(annual(rng), encoding="utf-8")
    (args.out / "departments.geojson").write_text(geo(), encoding="utf-8")


if __name__ == "__main__":
    main()
