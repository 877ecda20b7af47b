#!/usr/bin/env python3
"""Write synthetic monthly CO2 and temperature series in the NOAA file layouts.

The series are a smooth CO2 curve with a seasonal cycle, a global absolute
temperature that tracks CO2 with autocorrelated noise, and a mid-latitude
city temperature with a strong seasonal cycle. A few months are marked
missing so the ingestion path that drops incomplete years is exercised.
"""

import argparse
import pathlib

import numpy as np


def co2_series(rng):
    rows = []
    for year in range(1958, 2024):
        for month in range(1, 13):
            if year == 1958 and month < 3:
                continue
            s = year - 1958 + (month - 0.5) / 12
            trend = 315.0 + 0.8 * s + 0.0125 * s * s
            season = 3.0 * np.sin(2 * np.pi * (month - 2) / 12)
            value = trend + season + rng.normal(0.0, 0.15)
            missing = (year, month) in {(1958, 6), (1964, 2), (1964, 3), (1964, 4)}
            rows.append((year, month, year + (month - 0.5) / 12, -99.99 if missing else value, trend))
    return rows


def annual_co2(rows):
    by_year = {}
    for year, _, _, _, trend in rows:
        by_year.setdefault(year, []).append(trend)
    return {y: float(np.mean(v)) for y, v in by_year.items()}


def global_series(rng, co2_by_year):
    rows = []
    anomaly_noise = 0.0
    for year in range(1950, 2024):
        c = co2_by_year.get(year, 315.0 - 0.8 * (1958 - year))
        for month in range(1, 13):
            anomaly_noise = 0.6 * anomaly_noise + rng.normal(0.0, 0.06)
            anomaly = 0.0105 * (c - 317.0) + anomaly_noise
            season = 1.9 * np.cos(2 * np.pi * (month - 7) / 12)
            rows.append((year, month, 13.9 + season + anomaly, anomaly))
    return rows


def local_series(rng):
    rows = []
    for year in range(1950, 2024):
        for month in range(1, 13):
            base = 54.0 + 21.0 * np.cos(2 * np.pi * (month - 7) / 12) + 0.035 * (year - 1950)
            value = base + rng.normal(0.0, 2.2)
            missing = (year, month) in {(1972, 8), (1990, 1)}
            rows.append((year, month, -99.0 if missing else value, value - 54.0))
    return rows


def write_mauna_loa(path, rows):
    with open(path, "w") as f:
        f.write("# Synthetic surrogate in the layout of the NOAA GML Mauna Loa monthly mean file.\n")
        f.write("# Not measured data. Missing months are marked -99.99.\n")
        f.write("year,month,decimal date,average,deseasonalized,ndays,sdev,unc\n")
        for year, month, dec, value, trend in rows:
            days = -1 if value == -99.99 else 27
            f.write(f"{year},{month},{dec:.4f},{value:.2f},{trend:.2f},{days},-9.99,-0.99\n")


def write_cag(path, title, units, missing, rows):
    with open(path, "w") as f:
        f.write(f"{title}\n")
        f.write(f"Units: {units}\n")
        f.write("Base Period: 1901-2000\n")
        f.write(f"Missing: {missing}\n")
        f.write("Date,Value,Anomaly\n")
        for year, month, value, anomaly in rows:
            f.write(f"{year}{month:02d},{value:.2f},{anomaly:.2f}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures"))
    ap.add_argument("--seed", type=int, default=20240101)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    co2 = co2_series(rng)
    write_mauna_loa(out / "co2_mm_mlo_surrogate.csv", co2)
    write_cag(out / "global_temperature_surrogate.csv",
              "Global Land and Ocean Average Temperature (synthetic surrogate)",
              "Degrees Celsius", -999, global_series(rng, annual_co2(co2)))
    write_cag(out / "local_temperature_surrogate.csv",
              "Surrogate City Average Temperature (synthetic surrogate)",
              "Degrees Fahrenheit", -99, local_series(rng))


if __name__ == "__main__":
    main()
