"""Regenerate the synthetic data files shipped under src/fgfusion/data/.

Every generator is seeded, so reruns reproduce the shipped files byte
for byte.  Run from the repository root:

    python3 tools/make_fixtures.py
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fgfusion.corpus import Document, save_offline  # noqa: E402

DATA = ROOT / "src" / "fgfusion" / "data"

FILLER = (
    "maritime study model method data framework approach results analysis "
    "operational safety risk evaluation network architecture measurement "
    "review survey experiments protocol monitoring signal estimation"
).split()


def _doc_text(rng, keyword_counts, total_filler=14):
    words = []
    for kw, count in keyword_counts.items():
        words.extend([kw] * int(count))
    words.extend(rng.choice(FILLER, size=total_filler).tolist())
    perm = rng.permutation(len(words))
    return " ".join(words[i] for i in perm)


def make_corpus_k6(path: Path):
    """40 documents over a 6-keyword pool with exactly tied top totals.

    Totals are [60, 60, 40, 30, 20, 10]; the two tied leaders make the
    exhaustive front a three-member family (each leader alone, or both
    together), which a search run can be checked against.
    """
    pool = ["ship", "collision", "sensor", "autonomous", "cargo", "navigation"]
    totals = [60, 60, 40, 30, 20, 10]
    m = 40
    rng = np.random.default_rng(61)
    per_doc = np.zeros((len(pool), m), dtype=int)
    for i, total in enumerate(totals):
        per_doc[i] = rng.multinomial(total, np.full(m, 1.0 / m))
    docs = []
    for j in range(m):
        kw_counts = {pool[i]: per_doc[i, j] for i in range(len(pool)) if per_doc[i, j] > 0}
        body = _doc_text(rng, kw_counts)
        docs.append(
            Document(
                id=f"k6-{j:03d}",
                title=f"Operational note {j:03d}",
                abstract=body,
                pdf_url=None,
                source="synthetic",
                relevant=None,
            )
        )
    save_offline(docs, path)
    return np.array(totals), per_doc


TOPIC_RATES = {
    # per-keyword Poisson rates by topic; the first topic is the relevant one
    "ship": (1.2, 0.25, 0.45),
    "vessel": (0.9, 0.15, 0.35),
    "boat": (0.25, 0.1, 0.2),
    "craft": (0.2, 0.1, 0.1),
    "collision": (1.5, 0.1, 0.1),
    "bump": (0.35, 0.05, 0.05),
    "fault": (1.1, 0.5, 0.15),
    "hit": (0.4, 0.1, 0.1),
    "impact": (0.8, 0.3, 0.2),
    "accident": (0.9, 0.1, 0.15),
    "component": (0.7, 1.4, 0.2),
    "gear": (0.2, 0.8, 0.15),
    "apparatus": (0.15, 0.6, 0.1),
    "device": (0.35, 1.1, 0.2),
    "equipment": (0.4, 1.0, 0.25),
    "autonomous": (1.3, 0.35, 0.3),
    "self-driving": (0.5, 0.1, 0.1),
    "self-navigating": (0.35, 0.05, 0.05),
    "unmanned": (0.8, 0.15, 0.2),
    "cargo": (0.9, 0.2, 1.3),
    "freighter": (0.25, 0.05, 0.7),
    "bulk": (0.15, 0.1, 0.6),
    "container": (0.3, 0.15, 1.1),
    "tanker": (0.15, 0.05, 0.55),
}

TOPIC_SIZES = (80, 60, 60)


def make_corpus_200(path: Path):
    """200 documents in three topic groups with distinct keyword rates.

    Topic 0 plays the relevant class for retrieval scoring; the other
    two topics skew toward the component and cargo vocabularies.
    """
    rng = np.random.default_rng(200)
    docs = []
    idx = 0
    for topic, size in enumerate(TOPIC_SIZES):
        for _ in range(size):
            kw_counts = {}
            for kw, rates in TOPIC_RATES.items():
                c = rng.poisson(rates[topic])
                if c > 0:
                    kw_counts[kw] = c
            body = _doc_text(rng, kw_counts, total_filler=18)
            docs.append(
                Document(
                    id=f"c200-{idx:03d}",
                    title=f"Abstract {idx:03d} topic {topic}",
                    abstract=body,
                    pdf_url=None,
                    source="synthetic",
                    relevant=(topic == 0),
                )
            )
            idx += 1
    save_offline(docs, path)


SYSTEM_PLANS = {
    (1, 1): (
        "Target and Obstacle Perception System",
        [
            ("Sonar System", "Array Transducer", "signal dropout", "transducer crystal aging", "obstacle returns fade below the detection threshold near the bow sector", "inspect the transducer array and replace aged crystal elements"),
            ("Sonar System", "Beamformer Card", "channel saturation", "gain stage drift in humid conditions", "phantom echoes crowd the obstacle track list and mask real contacts", "adjust receiver gain and restart the beamformer card"),
            ("Lidar Unit", "Rotating Mirror", "sweep stall", "bearing wear under continuous rotation", "forward obstacle map freezes and close-range contacts go unreported", "isolate the unit and replace the mirror bearing"),
            ("Camera Rig", "Stabilizer Mount", "horizon drift", "loosened mount fasteners from hull vibration", "perception fusion rejects the video stream and coverage narrows", "inspect mount fasteners and adjust the stabilizer preload"),
            ("Radar Front End", "Waveguide Joint", "return attenuation", "moisture ingress at the joint gasket", "long-range target returns weaken and tracking initiation is delayed", "replace the joint gasket and test the waveguide pressurization"),
        ],
    ),
    (1, 2): (
        "Positioning System",
        [
            ("Satellite Receiver", "Antenna Feed", "fix instability", "feed cable shielding abrasion", "position jumps several meters and track smoothing diverges", "inspect the feed cable and replace abraded shielding"),
            ("Satellite Receiver", "Clock Module", "time drift", "oscillator temperature sensitivity", "pseudorange errors accumulate and the fix quality flag degrades", "switch to the backup oscillator and monitor drift"),
            ("Inertial Unit", "Gyro Assembly", "bias runaway", "dead-reckoning accumulates heading error after gyro shock", "dead-reckoning heading departs from ground truth during outages", "restart the inertial unit and record the bias calibration"),
            ("Beacon Interface", "Decoder Board", "message loss", "decoder firmware watchdog resets", "differential corrections drop and accuracy falls to standalone levels", "test the decoder board and switch to the spare channel"),
            ("Antenna Mast", "Mount Flange", "alignment shift", "flange weld fatigue in heavy seas", "antenna boresight wanders and satellite lock is intermittent", "weld the flange seam and inspect mast alignment"),
        ],
    ),
    (1, 3): (
        "Side Propulsion System",
        [
            ("Bow Thruster", "Impeller", "thrust loss", "impeller blade erosion from cavitation", "docking maneuvers need longer runway and lateral control weakens", "replace the eroded impeller and inspect the duct lining"),
            ("Bow Thruster", "Drive Motor", "overcurrent trip", "winding insulation breakdown", "thruster cuts out mid-maneuver and berthing is aborted", "isolate the drive motor and test winding insulation"),
            ("Stern Thruster", "Pitch Actuator", "pitch hunting", "servo valve contamination", "lateral thrust oscillates and position holding consumes extra power", "switch the servo valve and adjust the pitch loop gains"),
            ("Hydraulic Pack", "Pressure Pump", "pressure sag", "pump seal wear", "actuator response slows and thrust vector lags commands", "replace the pump seals and monitor the pressure trend"),
            ("Control Cabinet", "Relay Block", "command dropout", "relay contact oxidation", "thruster ignores direction commands for seconds at a time", "inspect the relay block and replace oxidized contacts"),
        ],
    ),
    (1, 4): (
        "Power System",
        [
            ("Main Generator", "Voltage Regulator", "voltage swing", "regulator feedback capacitor aging", "bus voltage oscillates and sensitive loads brown out", "replace the regulator capacitor bank and monitor bus voltage"),
            ("Main Generator", "Cooling Loop", "overtemperature", "coolant pump impeller blockage", "generator derates and the vessel sheds nonessential loads", "inspect the coolant pump and restart the cooling loop"),
            ("Switchboard", "Bus Tie Breaker", "nuisance trip", "breaker coil insulation leak", "power splits between buses and redundancy margin is lost", "test the breaker coil and replace the insulation kit"),
            ("Battery Bank", "Cell String", "capacity fade", "cell electrolyte dry-out", "blackout ride-through time shrinks below the rated window", "record string capacity and replace the weakest cells"),
            ("Shore Connection", "Inlet Contactor", "contact chatter", "contactor spring fatigue", "harbor supply flickers and charging cycles abort", "replace the contactor springs and inspect the inlet terminals"),
        ],
    ),
    (1, 5): (
        "Navigational Aid System",
        [
            ("Chart Server", "Storage Array", "chart corruption", "storage block failures in the array", "route planning loads stale charts and hazard overlays vanish", "isolate the failing drives and restore charts from backup then record the incident"),
            ("Chart Server", "Update Daemon", "update stall", "daemon deadlock on catalog lock", "new notices to mariners never reach the bridge display", "restart the update daemon and monitor the catalog queue"),
            ("Signal Lamp", "Driver Circuit", "flash misfire", "driver transistor thermal runaway", "signaling sequences break and nearby traffic misreads intent", "replace the driver transistor and test the flash pattern"),
            ("Echo Sounder", "Transceiver", "depth spikes", "transceiver matching network detune", "false shallow readings trigger spurious grounding alarms", "adjust the matching network and monitor depth traces"),
            ("Compass Module", "Fluxgate Sensor", "heading wander", "fluxgate excitation supply ripple", "autopilot weaves around the set course and fuel use climbs", "replace the excitation filter and record compass deviation"),
        ],
    ),
    (2, 1): (
        "Ship-to-Shore Communication System",
        [
            ("Shipboard Server", "Server Motherboard", "boot failure", "motherboard capacitor failure", "shore link services stay offline and telemetry backlog grows", "replace the server motherboard and restart the communication stack"),
            ("Shipboard Server", "Power Supply Unit", "rail instability", "supply fan bearing seizure", "server reboots at random and session keys renegotiate constantly", "replace the supply unit and monitor rail voltages"),
            ("Satcom Terminal", "Block Upconverter", "uplink degradation", "upconverter local oscillator drift", "data rate collapses and remote operators see stale telemetry", "adjust the oscillator reference and test the uplink chain"),
            ("Antenna Pedestal", "Azimuth Drive", "tracking lag", "azimuth gearbox backlash growth", "the dish trails the satellite and handovers drop the link", "inspect the gearbox and adjust backlash compensation"),
            ("Network Switch", "Uplink Port", "packet loss", "port transceiver photodiode decay", "priority traffic queues overflow and voice calls break up", "switch traffic to the spare port and replace the transceiver"),
        ],
    ),
    (2, 2): (
        "Shore-based Dispatch Communication System",
        [
            ("Dispatch Console", "Headset Interface", "audio dropouts", "interface jack solder fractures", "dispatcher instructions arrive clipped and confirmations repeat", "repair the jack soldering and test the audio path"),
            ("Dispatch Console", "Display Panel", "panel blackout", "panel backlight inverter failure", "operators lose the fleet overview during shift handoff", "replace the backlight inverter and restart the console"),
            ("Trunk Radio", "Repeater Amplifier", "coverage holes", "amplifier output stage degradation", "vessels near the breakwater miss dispatch calls", "test the output stage and replace the amplifier module"),
            ("Message Gateway", "Queue Service", "message pileup", "queue service memory leak", "berth assignments arrive late and schedules slip", "restart the queue service and monitor memory usage"),
            ("Logging Server", "Archive Disk", "log gaps", "archive disk sector failures", "incident reviews lack the radio transcript evidence", "replace the archive disk and record the recovery checksum"),
        ],
    ),
    (2, 3): (
        "Shore-based Meteorological Service System",
        [
            ("Forecast Engine", "Compute Node", "run abort", "compute node memory module errors", "route weather advisories fall back to the previous cycle", "isolate the node and replace the faulty memory module"),
            ("Forecast Engine", "Model Feed", "feed outage", "upstream feed certificate expiry", "forecast grids go stale and confidence intervals widen", "switch the feed endpoint and record the certificate renewal"),
            ("Coastal Radar", "Rotary Joint", "azimuth noise", "rotary joint contact wear", "precipitation cells smear and squall warnings lag", "replace the rotary joint and test azimuth encoding"),
            ("Buoy Gateway", "Modem Bank", "report loss", "modem bank surge damage", "wave height inputs vanish from the nowcast assimilation", "replace the damaged modems and monitor buoy check-ins"),
            ("Warning Broadcast", "Scheduler", "broadcast skew", "scheduler clock misconfiguration", "gale warnings reach vessels after the weather window closes", "adjust the scheduler clock and test the broadcast chain"),
        ],
    ),
    (2, 4): (
        "Shore-based Remote Control Center",
        [
            ("Operator Station", "Control Joystick", "command jitter", "joystick potentiometer wear", "remote helm inputs wobble and fine docking is suspended", "replace the joystick potentiometer and test command smoothing"),
            ("Operator Station", "Video Wall", "tile flicker", "video wall feed synchronization fault", "situational view fragments during critical approaches", "restart the video controllers and monitor sync status"),
            ("Command Relay", "Session Manager", "session drop", "session manager thread exhaustion", "control authority bounces between stations mid-passage", "restart the session manager and record the handover log"),
            ("Link Monitor", "Latency Probe", "blind spots", "latency probe misconfiguration", "degraded links go unflagged until operators lose response", "adjust probe thresholds and test alerting"),
            ("Failover Cluster", "Heartbeat Bus", "split brain", "heartbeat bus termination fault", "two stations briefly claim the same vessel", "repair the bus termination and test the failover drill"),
        ],
    ),
    (3, 1): (
        "Intelligent Navigation Control System",
        [
            ("Route Planner", "Optimization Core", "plan timeout", "optimization core state explosion on dense traffic", "the vessel holds position awaiting a feasible route", "restart the planner with staged horizons and record the scenario"),
            ("Route Planner", "Constraint Store", "rule conflict", "constraint store version skew", "planned tracks brush separation minima and audits flag violations", "switch to the validated ruleset and test constraint loading"),
            ("Collision Avoider", "Intent Estimator", "intent misread", "estimator model overfit to calm traffic", "evasive maneuvers trigger late against erratic targets", "adjust estimator thresholds and monitor encounter replays"),
            ("Track Keeper", "Steering Filter", "rudder chatter", "steering filter gain misestimate", "rudder machinery wears fast and track keeping jitters", "adjust filter gains and inspect rudder linkage wear"),
            ("Docking Module", "Berth Matcher", "alignment misjudge", "berth matcher calibration offset", "auto-docking aborts on final approach and tugs are called", "adjust the matcher calibration and test against the berth survey"),
        ],
    ),
    (3, 2): (
        "Intelligent Energy Storage System",
        [
            ("Battery Management", "Cell Balancer", "imbalance growth", "balancer bleed resistor failures", "usable capacity shrinks and range estimates turn optimistic", "replace the bleed resistors and record the balancing report"),
            ("Battery Management", "Thermal Model", "temperature misestimate", "thermal model sensor placement bias", "charge rates exceed safe envelopes in warm compartments", "adjust the model offsets and monitor compartment probes"),
            ("Charge Scheduler", "Tariff Agent", "schedule thrash", "tariff agent oscillating price inputs", "charging flips on and off and contactors wear early", "switch to smoothed tariffs and monitor contactor cycles"),
            ("Power Converter", "IGBT Stage", "switching faults", "IGBT gate driver degradation", "propulsion draw ripples and breakers approach trip curves", "replace the gate drivers and test the converter under load"),
            ("Energy Telemetry", "Metering Bus", "reading dropouts", "metering bus connector corrosion", "efficiency dashboards mislead and anomalies hide in gaps", "inspect bus connectors and replace corroded pins"),
        ],
    ),
    (3, 3): (
        "Intelligent Cargo Hold System",
        [
            ("Hold Monitor", "Gas Sensor Grid", "reading drift", "sensor grid reference cell depletion", "ventilation triggers late and cargo air quality drifts", "replace the reference cells and test the alarm ladder"),
            ("Hold Monitor", "Humidity Probe", "probe saturation", "humidity probe membrane fouling", "condensation risk is underestimated and cargo spots", "replace the probe membrane and monitor hold humidity"),
            ("Lashing Supervisor", "Tension Sensor", "tension misreport", "tension sensor bracket loosening", "loose lashings pass checks and shifting risk rises in swell", "inspect sensor brackets and adjust lashing tension"),
            ("Reefer Controller", "Compressor Driver", "cooling shortfall", "compressor driver capacitor aging", "reefer containers warm toward the spoilage threshold", "replace the driver capacitors and monitor container temperatures"),
            ("Stevedore Interface", "Manifest Sync", "manifest mismatch", "manifest sync conflict resolution bug", "discharge order diverges from the stowage plan and cranes idle", "restart the sync service and record the manifest diff"),
        ],
    ),
}


def make_records(path: Path):
    """Sixty records: five failure modes for each of the twelve systems."""
    rows = []
    for (cat, sys_digit), (label, entries) in sorted(SYSTEM_PLANS.items()):
        sub_index = {}
        comp_counter = {}
        for mode_i, (sub, comp, mode, reason, effect, measure) in enumerate(entries, start=1):
            if sub not in sub_index:
                sub_index[sub] = len(sub_index) + 1
            sub_d = sub_index[sub]
            comp_key = (sub, comp)
            if comp_key not in comp_counter:
                comp_counter[comp_key] = sum(1 for k in comp_counter if k[0] == sub) + 1
            comp_d = comp_counter[comp_key]
            rid = f"{cat}{sys_digit}{sub_d:02d}{comp_d:02d}{mode_i:02d}"
            rows.append(
                {
                    "id": rid,
                    "system": label,
                    "subsystem": sub,
                    "component": comp,
                    "failure_mode": mode,
                    "failure_reason": reason,
                    "failure_effect": effect,
                    "emergency_measure": measure,
                }
            )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(
            fh,
            fieldnames=[
                "id", "system", "subsystem", "component",
                "failure_mode", "failure_reason", "failure_effect", "emergency_measure",
            ],
            lineterminator="\n",
        )
        writer.writeheader()
        writer.writerows(rows)
    return [r["id"] for r in rows]


def make_edges(path: Path, ids):
    """Seeded random propagation edges over the record ids, weights in (0, 1]."""
    rng = np.random.default_rng(90)
    pairs = set()
    target = 90
    while len(pairs) < target:
        a, b = rng.choice(len(ids), size=2, replace=False)
        pairs.add((ids[int(a)], ids[int(b)]))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["src", "dst", "weight"])
        for src, dst in sorted(pairs):
            w = round(float(rng.uniform(0.05, 1.0)), 4)
            writer.writerow([src, dst, repr(w)])


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    make_corpus_k6(DATA / "corpus_k6.jsonl")
    make_corpus_200(DATA / "corpus_200.jsonl")
    ids = make_records(DATA / "records_demo.csv")
    make_edges(DATA / "edges_demo.csv", ids)
    print("fixtures written to", DATA)


if __name__ == "__main__":
    main()
