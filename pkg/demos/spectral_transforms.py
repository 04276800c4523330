"""Learned spectrum versus the classical diffusion and Gaussian-field kernels.

All three shrink the spectrum on rough (large-eigenvalue) eigenvectors. The
learned one also weighs each eigenvector by how much of the labels it carries.

    python3 demos/spectral_transforms.py
"""

import numpy as np

from pfskl import experiment, skl

data = experiment.gen_g50c(0, n=200, d=10)
mask = experiment.make_splits(data, 20, 1, seed=0)[0]
split, order = experiment.apply_split(data, mask)
eig, _ = experiment.build_eigensystem(data, k=10, p=2)
eig = eig.permuted(order)

learned = skl.fit_skl_kta(split, eig).spectrum
diffusion = skl.parametric_transform(eig, "diffusion", 4.0)
field = skl.parametric_transform(eig, "gaussian_field", 0.1)

print(" gamma   learned  diffusion  gaussian_field")
for i in np.linspace(0, eig.n - 1, 10).astype(int):
    print(f"{eig.gamma[i]:6.3f}  {learned[i]:8.3f}  {diffusion[i]:9.3f}  {field[i]:14.3f}")

truth = data.labels[order][split.n_l:]
for name, spectrum in (("learned", None), ("diffusion", diffusion), ("gaussian_field", field)):
    if spectrum is None:
        model = skl.fit_skl_kta(split, eig)
    else:
        model = skl.fit_spectral(split, eig, spectrum, C=1.0, kind=name)
    _, pred = skl.predict(model, np.arange(split.n_l, split.n))
    print(f"{name:>14}: accuracy {np.mean(pred == truth):.3f}")
