"""Schematic crossover from Gaussian to exponential decay and the two t_c conventions.

Run: python3 demos/05_crossover_figure.py   (also writes ./figure1_demo/)
"""
from tbri_decay.experiment import figure1_data, write_figure1

d = figure1_data(gamma=0.5, delta_e=1.2)
print({k: round(v, 6) if isinstance(v, float) else v for k, v in d["markers"].items()})
print(d["note"])
for f in write_figure1("figure1_demo"):
    print("wrote", f)
