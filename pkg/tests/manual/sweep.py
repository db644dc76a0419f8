# plots a sweep table against its predicted bounds
# python3 sweep.py <path_to_sweep.csv> [loglog_n|log_inv_p]
import os
import sys
import matplotlib.pyplot as plt
import damsenviet.pzf as pzf

AXES = ["loglog_n", "log_inv_p"]

if len(sys.argv) < 2 or len(sys.argv) > 3:
    exit(1)
csv_path = os.path.join(os.getcwd(), os.path.expanduser(sys.argv[1]))
x_axis = sys.argv[2] if len(sys.argv) == 3 else AXES[0]
if x_axis not in AXES:
    print(f'Invalid Axis: "{x_axis}", expected one of {AXES}.')
    exit(1)
print(f"Examining sweep: {csv_path}")

table = pzf.SweepTable.read_csv(csv_path)
rows = sorted(table.complete_rows(), key=lambda row: row.value(x_axis))
if not rows:
    print("No complete rows to plot.")
    exit(1)
xs = [row.value(x_axis) for row in rows]

plt.figure(figsize=(7, 5))
plt.fill_between(
    xs,
    [row.stats.q10 for row in rows],
    [row.stats.q90 for row in rows],
    color="b",
    alpha=0.15,
    label="q10 to q90",
)
plt.plot(xs, [row.stats.median for row in rows], "b.-", label="median pt")
predicted = [row for row in rows if row.prediction is not None]
if predicted:
    px = [row.value(x_axis) for row in predicted]
    plt.plot(px, [row.prediction.upper for row in predicted], "r--", label="upper")
    plt.plot(px, [row.prediction.lower for row in predicted], "g--", label="lower")
for model in AXES:
    try:
        fit = pzf.fit_growth(table, model)
    except pzf.IllegalValueException:
        continue
    print(f"{model}: slope {fit.slope:.4f} intercept {fit.intercept:.4f}")

plt.legend(fontsize=9, loc="upper left")
plt.xlabel(x_axis)
plt.ylabel("rounds")
plt.title("Propagation time", loc="center")
plt.show()
