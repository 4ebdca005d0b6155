"""
Data Service - loads and validates data files
Turns JSON documents into FiniteGroup, Cocycle2 and OrbifoldData objects
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import ValidationError

from src.algebra.cohom import Cocycle2
from src.algebra.genus import FixedComponent, NormalLine, OrbifoldData
from src.algebra.groups import CommutingPair, FiniteGroup
from src.algebra.series import LinearForm
from src.models.cohomology_models import CocycleFile
from src.models.group_models import GroupSpec
from src.models.orbifold_models import ComponentSpec, OrbifoldFile
from src.utils.errors import InputError, PoleError, StructureError

DataObject = Union[OrbifoldData, Cocycle2, FiniteGroup]


def _location(loc) -> str:
    out = ""
    for part in loc:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


class DataService:
    """
    Reads data files with caching.

    Every failure is raised as InputError carrying the file and field path.
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.document_cache: Dict[str, Any] = {}

    def load_document(self, path: str) -> Any:
        key = str(Path(path).resolve())
        if key in self.document_cache:
            return self.document_cache[key]
        file = Path(path)
        if not file.exists():
            raise InputError("file not found", location=path)
        try:
            document = json.loads(file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise InputError(f"parse error: {e.msg}", location=f"{path}:{e.lineno}:{e.colno}")
        self.document_cache[key] = document
        self.logger.info(f"Loaded {path}")
        return document

    def _validate(self, model, document: Any, path: str):
        try:
            return model.model_validate(document)
        except ValidationError as e:
            first = e.errors()[0]
            where = f"{path}: {_location(first['loc'])}"
            raise InputError(f"{first['msg']} ({e.error_count()} error(s))", location=where)

    # ---------------------------------------------------------
    # Groups
    # ---------------------------------------------------------
    def build_group(self, spec: GroupSpec, path: str = "<group>") -> FiniteGroup:
        try:
            if spec.table is not None:
                return FiniteGroup.from_table(spec.table.elements, spec.table.mul, spec.name or "G")
            if spec.symmetric is not None:
                return FiniteGroup.symmetric_group(spec.symmetric)
            if spec.dihedral is not None:
                return FiniteGroup.dihedral_group(spec.dihedral)
            return FiniteGroup.abelian(spec.abelian or [], spec.name)
        except StructureError as e:
            raise InputError(f"group axioms: {e}", location=f"{path}: group")

    def load_group(self, path: str) -> FiniteGroup:
        document = self.load_document(path)
        if isinstance(document, dict) and "group" in document:
            document = document["group"]
        return self.build_group(self._validate(GroupSpec, document, path), path)

    # ---------------------------------------------------------
    # Cochains
    # ---------------------------------------------------------
    def load_cocycle(self, path: str) -> Cocycle2:
        """
        Load a cocycle file: a group block, a modulus and a |G| x |G| table

        Args:
            path: Path to the JSON cocycle file

        Returns:
            Cocycle2 that has passed the cocycle identity
        """
        spec = self._validate(CocycleFile, self.load_document(path), path)
        group = self.build_group(spec.group, path)
        try:
            return Cocycle2(group, spec.modulus, spec.table)
        except StructureError as e:
            raise InputError(str(e), location=f"{path}: table")

    # ---------------------------------------------------------
    # Orbifold data
    # ---------------------------------------------------------
    def _component(self, spec: ComponentSpec) -> FixedComponent:
        lines = []
        for line in spec.normal_lines:
            lift = None if line.lift is None else (line.lift.A, line.lift.B)
            lines.append(NormalLine(LinearForm.of(line.root), line.a, line.b, lift))
        return FixedComponent(
            name=spec.name,
            dim=spec.dim,
            generators=tuple(spec.generators),
            tangent_roots=tuple(LinearForm.of(root) for root in spec.tangent_roots),
            normal_lines=tuple(lines),
            integral=spec.monomials(),
        )

    def load_orbifold(self, path: str) -> OrbifoldData:
        """
        Load and validate an orbifold data file

        Args:
            path: Path to the JSON orbifold file

        Returns:
            OrbifoldData with every component checked against the pole invariant
        """
        # Step 1: Schema
        spec = self._validate(OrbifoldFile, self.load_document(path), path)
        group = self.build_group(spec.group, path)
        n = group.exponent

        # Step 2: Build components, keyed by commuting pair
        ambient = [self._component(c) for c in spec.ambient]
        sectors = {}
        for s, sector in enumerate(spec.sectors):
            g, h = sector.pair
            if not (0 <= g < group.order and 0 <= h < group.order):
                raise InputError(f"pair {[g, h]} is not a pair of elements", location=f"{path}: sectors[{s}].pair")
            sectors[CommutingPair(g, h)] = [
                self._component(c) for c in sector.components
            ]
        data = OrbifoldData(group, ambient, sectors, spec.trivial_action, spec.name)

        # Step 3: Domain invariants, reported with field paths
        for s, sector in enumerate(spec.sectors):
            for i, comp in enumerate(sectors[CommutingPair(*sector.pair)]):
                where = f"{path}: sectors[{s}].components[{i}]"
                try:
                    comp.validate(n)
                except PoleError as e:
                    raise InputError(f"pole invariant: {e}", location=where)
                except StructureError as e:
                    raise InputError(str(e), location=where)
        try:
            data.validate()
        except PoleError as e:
            raise InputError(f"pole invariant: {e}", location=path)
        except StructureError as e:
            raise InputError(str(e), location=path)
        self.logger.info(f"Orbifold {data.name}: |G| = {group.order}, {len(sectors)} sector blocks")
        return data

    def parse_datafile(self, path: str) -> DataObject:
        """Dispatch on the document's top-level keys"""
        document = self.load_document(path)
        if not isinstance(document, dict):
            raise InputError("top level must be an object", location=path)
        if "modulus" in document:
            return self.load_cocycle(path)
        if {"sectors", "ambient", "trivial_action"} & set(document):
            return self.load_orbifold(path)
        return self.load_group(path)


_data_instance = None


def get_data_service() -> DataService:
    """Singleton pattern for the data service"""
    global _data_instance
    if _data_instance is None:
        _data_instance = DataService()
    return _data_instance
