"""P1 finite elements on meridian meshes: fields, assembly, integrals."""
