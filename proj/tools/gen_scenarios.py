#!/usr/bin/env python3
"""Regenerates the seeded desk-scale scenario data files under data/scenarios/.

The coffee scenario is hand-written and not touched here.
"""
import math
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "scenarios"


def table(name, entries):
    lines = [f"{name} = {{"]
    items = list(entries.items())
    for i, (key, value) in enumerate(items):
        if isinstance(key, tuple):
            k = "(" + ", ".join(f"'{e}'" for e in key) + ")"
        else:
            k = f"'{key}'"
        sep = "," if i + 1 < len(items) else ""
        lines.append(f"    {k}: {value}{sep}")
    lines.append("}")
    return "\n".join(lines)


def write(name, header, tables):
    text = header.strip() + "\n\n" + "\n\n".join(tables) + "\n"
    (OUT / f"{name}.dat").write_text(text)


def facility_location(seed=11):
    rng = random.Random(seed)
    fac = [f"facility{i}" for i in range(1, 7)]
    cus = [f"customer{i}" for i in range(1, 9)]
    fpos = {f: (rng.randint(0, 50), rng.randint(0, 50)) for f in fac}
    cpos = {c: (rng.randint(0, 50), rng.randint(0, 50)) for c in cus}
    fixed = {f: rng.randint(60, 140) for f in fac}
    cap = {f: rng.randint(30, 60) for f in fac}
    demand = {c: rng.randint(6, 16) for c in cus}
    cost = {(f, c): 1 + round(math.dist(fpos[f], cpos[c]) / 10) for f in fac for c in cus}
    header = f"""
# Seeded capacitated facility location (seed {seed}).
%scenario facility_location
%describe A distributor decides which warehouses (facilities) to open and how many units each
%describe open facility ships to each customer. Opening a facility has a fixed cost, shipping has a
%describe per-unit cost, facilities have capacities, and every customer demand must be met.
%entity facility: {", ".join(fac)}
%entity customer: {", ".join(cus)}
%param fixed_cost(facility)
%param capacity(facility)
%param demand(customer)
%param transport_cost(facility, customer)
%deny contact, phone, email, address
"""
    write("facility_location", header, [table("fixed_cost", fixed), table("capacity", cap),
                                         table("demand", demand), table("transport_cost", cost)])


def mcnf(seed=23):
    rng = random.Random(seed)
    nodes = ["plant1", "plant2", "hub1", "hub2", "market1", "market2"]
    arcs = [("plant1", "hub1"), ("plant1", "hub2"), ("plant2", "hub1"), ("plant2", "hub2"),
            ("hub1", "hub2"), ("hub2", "hub1"), ("hub1", "market1"), ("hub1", "market2"),
            ("hub2", "market1"), ("hub2", "market2"), ("plant1", "market2"), ("plant2", "market1")]
    cap = {(i, j): 0 for i in nodes for j in nodes}
    cost = {(i, j): 0 for i in nodes for j in nodes}
    for a in arcs:
        direct = a[0].startswith("plant") and a[1].startswith("market")
        cap[a] = rng.randint(3, 5) if direct else rng.randint(7, 12)
        cost[a] = rng.randint(8, 12) if direct else rng.randint(1, 5)
    supply = {(k, n): 0 for k in ["widgets", "gadgets"] for n in nodes}
    supply[("widgets", "plant1")] = 12
    supply[("widgets", "market2")] = -12
    supply[("gadgets", "plant2")] = 10
    supply[("gadgets", "market1")] = -10
    header = f"""
# Seeded two-commodity network flow (seed {seed}); node pairs with zero capacity are not arcs.
%scenario mcnf
%describe Two products (commodities) move from plants through hubs to markets over a shared
%describe network. Each arc has a per-unit cost and a capacity shared by both products. Net supply
%describe is positive at a product's plant and negative at the market that consumes it.
%entity commodity: widgets, gadgets
%entity node: {", ".join(nodes)}
%param arc_capacity(node, node)
%param arc_cost(node, node)
%param net_supply(commodity, node)
%deny contact, phone, email, address
"""
    write("mcnf", header, [table("arc_capacity", cap), table("arc_cost", cost),
                           table("net_supply", supply)])


def workforce(seed=37):
    rng = random.Random(seed)
    workers = [f"worker{i}" for i in range(1, 7)]
    tasks = [f"task{i}" for i in range(1, 6)]
    cost = {(w, t): rng.randint(4, 15) for w in workers for t in tasks}
    qualified = {(w, t): 1 if rng.random() < 0.6 else 0 for w in workers for t in tasks}
    for t in tasks:
        while sum(qualified[(w, t)] for w in workers) < 2:
            qualified[(rng.choice(workers), t)] = 1
    max_tasks = {w: rng.randint(1, 2) for w in workers}
    staff = {t: 1 for t in tasks}
    header = f"""
# Seeded workforce assignment (seed {seed}).
%scenario workforce
%describe A shift manager assigns workers to tasks. A worker can only take tasks they are
%describe qualified for, each worker has a maximum number of tasks, every task needs its
%describe required number of workers, and each assignment has a labor cost.
%entity worker: {", ".join(workers)}
%entity task: {", ".join(tasks)}
%param assign_cost(worker, task)
%param qualified(worker, task)
%param max_tasks(worker)
%param task_staff(task)
%deny contact, phone, email, address, salary
"""
    write("workforce", header, [table("assign_cost", cost), table("qualified", qualified),
                                table("max_tasks", max_tasks), table("task_staff", staff)])


def tsp(seed=41):
    rng = random.Random(seed)
    cities = [f"city{i}" for i in range(1, 9)]
    pos = {c: (rng.randint(0, 100), rng.randint(0, 100)) for c in cities}
    dist = {(a, b): (0 if a == b else round(math.dist(pos[a], pos[b])))
            for a in cities for b in cities}
    header = f"""
# Seeded 8-city symmetric traveling salesman instance (seed {seed}); city1 is the depot.
%scenario tsp
%describe A delivery vehicle starts at the depot city1, visits every city exactly once and
%describe returns to the depot. The route minimizes the total travel distance.
%entity city: {", ".join(cities)}
%param distance(city, city)
%deny contact, phone, email, address
"""
    write("tsp", header, [table("distance", dist)])


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    facility_location()
    mcnf()
    workforce()
    tsp()
