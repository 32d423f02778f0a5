#!/usr/bin/env python3
"""Generate the synthetic 24 h two-constellation scenario (synthetic24h.json)."""
import argparse
import json
import random


def tle_checksum(line):
    total = 0
    for ch in line[:68]:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


def tle_lines(catnr, epoch_yyddd, inc, raan, ecc, argp, ma, mm):
    l1 = (f"1 {catnr:05d}U 24001A   {epoch_yyddd:14.8f}  .00000000  00000-0  00000-0 0  999")
    l2 = (f"2 {catnr:05d} {inc:8.4f} {raan:8.4f} {int(round(ecc * 1e7)):07d} "
          f"{argp:8.4f} {ma:8.4f} {mm:11.8f}    1")
    l1 = l1.ljust(68)[:68]
    l2 = l2.ljust(68)[:68]
    return [l1 + str(tle_checksum(l1)), l2 + str(tle_checksum(l2))]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="synthetic24h.json")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    epoch = "2024-03-01T00:00:00Z"
    epoch_yyddd = 24061.0  # 2024-03-01 00:00 UTC
    horizon = 1440

    satellites = []
    for k in range(4):
        satellites.append({
            "id": f"low-{k}",
            "priority": "low",
            "tle": tle_lines(40000 + k, epoch_yyddd, 97.5, (k * 90.0) % 360, 0.0005,
                             90.0, (k * 47.0) % 360, 15.2),
            "capacity_bytes": 40_000_000_000,
            "downlink_rate_bps": 160_000_000,
        })
    # High-priority satellites share the low-priority planes, trailing or
    # leading by a few degrees; the first n of them spread over all planes.
    for k in range(20):
        plane = k % 4
        offset = rng.choice([-1, 1]) * rng.uniform(2.0, 25.0)
        satellites.append({
            "id": f"high-{k:02d}",
            "priority": "high",
            "elements": {
                "inclination_deg": 97.5,
                "raan_deg": (plane * 90.0) % 360,
                "eccentricity": 0.0,
                "arg_perigee_deg": 90.0,
                "mean_anomaly_deg": round(((plane * 47.0) + offset) % 360, 3),
                "mean_motion_rev_per_day": 15.2,
                "epoch": epoch,
            },
        })

    sites = [
        ("svalbard", 78.23, 15.41), ("fairbanks", 64.86, -147.85), ("kiruna", 67.86, 20.96),
        ("inuvik", 68.36, -133.72), ("wallops", 37.94, -75.46), ("santiago", -33.15, -70.67),
        ("hartebeesthoek", -25.89, 27.69), ("dongara", -29.05, 115.35), ("punta-arenas", -52.94, -70.86),
        ("troll", -72.01, 2.53), ("singapore", 1.35, 103.82), ("hawaii", 19.82, -155.47),
    ]
    stations = []
    for i, (name, lat, lon) in enumerate(sites):
        stations.append({"id": name, "latitude_deg": lat, "longitude_deg": lon, "altitude_m": 0,
                         "antenna_count": 1 + (i % 2), "min_elevation_deg": 5})

    periodic = [{"satellite_id": f"low-{k}", "start_slot": 0, "every_slots": 2, "units_per_capture": 1,
                 "size_bytes": 200_000_000, "id_prefix": f"img{k}"} for k in range(4)]

    scenario = {
        "time": {"epoch": epoch, "slot_seconds": 60, "horizon_slots": horizon},
        "satellites": satellites,
        "stations": stations,
        "trace": {"periodic": periodic},
        "target": {
            "satellite_id": "low-0",
            "unit_ids": ["img0-100-0", "img0-102-0", "img0-104-0", "img0-106-0"],
            "attack_start_slot": 0,
            "target_downlink_slot": 400,
            "cost_budget": 40,
            "initial_queue": {"units": 40, "unit_bytes": 200_000_000, "id_prefix": "init-"},
        },
        "costs": {"unit_task_price": 1},
        "seed": 1,
    }
    with open(args.out, "w") as f:
        json.dump(scenario, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
