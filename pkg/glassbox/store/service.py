from glassbox.store.config import (MANIFEST_NAME, SUPPORTED_VERSIONS, MAGIC, REQUIRED_UPSTREAM, BINARY, CSV, FORMATS,
BINARY_SUFFIX)
from glassbox.store.views import (Manifest, ArtifactRef, ArraySpec, ArtifactError, HashMismatchError, ProvenanceError,
ArtifactKindError, UnsupportedVersionError)
from glassbox.store.codec import encode_array, decode_array, encode_csv, decode_csv, file_hash
from typing import Any, Callable, Iterable, Mapping
from pydantic import ValidationError
from pathlib import Path
import numpy as np
import tempfile
import hashlib
import logging
import shutil
import json
import os

logger = logging.getLogger(__name__)

Payload=bytes|str|Callable[[Path],Any]

def content_identity(files:Mapping[str,str], volatile:Iterable[str]=())->str:
    '''SHA-256 over the sorted (relative path, file hash) pairs, volatile files excluded.'''
    skip=set(volatile)
    lines=''.join(f'{name}:{digest}\n' for name,digest in sorted(files.items()) if name not in skip)
    return hashlib.sha256(lines.encode('utf-8')).hexdigest()

def read_manifest(path:str|Path)->Manifest:
    manifest_path=Path(path)/MANIFEST_NAME
    if not manifest_path.is_file():
        raise ArtifactError(f"No manifest at {manifest_path}")
    try:
        document=json.loads(manifest_path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as error:
        raise ArtifactError(f"Manifest {manifest_path} is not valid JSON: {error}") from None
    if document.get('magic')!=MAGIC.decode('ascii'):
        raise ArtifactError(f"Manifest {manifest_path} lacks the {MAGIC.decode('ascii')} magic")
    if document.get('format_version') not in SUPPORTED_VERSIONS:
        raise UnsupportedVersionError(f"Artifact {path} has format version {document.get('format_version')}, "
            f"supported: {list(SUPPORTED_VERSIONS)}")
    try:
        return Manifest.model_validate(document)
    except ValidationError as error:
        raise ArtifactError(f"Manifest {manifest_path} is malformed: {error}") from None

def artifact_hash(path:str|Path)->str:
    '''Content identity of an artifact recomputed from the files on disk (manifest and volatile files excluded).'''
    path=Path(path)
    manifest=read_manifest(path)
    files={name:file_hash(path/name) for name in manifest.files if (path/name).is_file()}
    return content_identity(files,manifest.volatile)

def ref_to(upstream:str|Path, relative_to:str|Path)->ArtifactRef:
    upstream=Path(upstream)
    manifest=read_manifest(upstream)
    location=os.path.relpath(upstream.resolve(),Path(relative_to).resolve())
    return ArtifactRef(kind=manifest.kind,path=Path(location).as_posix(),hash=manifest.content_hash)

def _write_payload(target:Path, payload:Payload):
    target.parent.mkdir(parents=True,exist_ok=True)
    if isinstance(payload,bytes):
        target.write_bytes(payload)
    elif isinstance(payload,str):
        target.write_text(payload,encoding='utf-8')
    else:
        payload(target)
    if not target.is_file():
        raise ArtifactError(f"Writer for {target.name} produced no file")

def write_artifact(path:str|Path, kind:str, files:Mapping[str,Payload], config:dict|None=None, seed:int|None=None,
    upstream:Iterable[str|Path|ArtifactRef]=(), arrays:Mapping[str,ArraySpec]|None=None, optional:Iterable[str]=(),
    volatile:Iterable[str]=(), summary:dict|None=None, overwrite:bool=False)->Path:
    '''
    Write an artifact directory atomically: every file goes into a temporary sibling directory, the manifest
    with per-file SHA-256 hashes is written last, and the directory is renamed into place.
    '''
    path=Path(path)
    if path.exists() and not overwrite:
        raise FileExistsError(f"Artifact path {path} already exists (pass overwrite=True to replace it)")
    path.parent.mkdir(parents=True,exist_ok=True)
    refs=[item if isinstance(item,ArtifactRef) else ref_to(item,path) for item in upstream]
    required=REQUIRED_UPSTREAM.get(kind)
    if required is not None and not any(ref.kind==required for ref in refs):
        raise ProvenanceError(f"A {kind} artifact needs a {required} upstream reference")
    staging=Path(tempfile.mkdtemp(prefix=f'.{path.name}.',dir=path.parent))
    try:
        hashes={}
        for name,payload in files.items():
            if name==MANIFEST_NAME:
                raise ArtifactError(f"{MANIFEST_NAME} is reserved for the manifest")
            _write_payload(staging/name,payload)
            hashes[name]=file_hash(staging/name)
        volatile=list(volatile)
        manifest=Manifest(kind=kind,config=config or {},seed=seed,files=hashes,arrays=dict(arrays or {}),
            upstream=refs,optional=list(optional),volatile=volatile,summary=summary or {},
            content_hash=content_identity(hashes,volatile))
        (staging/MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2),encoding='utf-8')
        if path.exists():
            retired=Path(tempfile.mkdtemp(prefix=f'.{path.name}.old.',dir=path.parent))
            os.replace(path,retired/path.name)
            os.replace(staging,path)
            shutil.rmtree(retired,ignore_errors=True)
        else:
            os.replace(staging,path)
    except BaseException:
        shutil.rmtree(staging,ignore_errors=True)
        raise
    logger.info(f"[Store] Wrote {kind} artifact {path} ({len(hashes)} files, {manifest.content_hash[:12]})")
    return path

class Artifact:
    '''A verified artifact directory and its manifest; the resolved upstream chain is in `chain`.'''
    def __init__(self,path:Path,manifest:Manifest,chain:list[tuple[Path,Manifest]]|None=None):
        self.path=path
        self.manifest=manifest
        self.chain=chain or []

    @property
    def kind(self)->str:
        return self.manifest.kind

    def has(self,name:str)->bool:
        return name in self.manifest.files and (self.path/name).is_file()

    def file(self,name:str)->Path:
        if name not in self.manifest.files:
            raise ArtifactError(f"{self.kind} artifact {self.path} has no file '{name}'")
        return self.path/name

    def read_bytes(self,name:str)->bytes:
        return self.file(name).read_bytes()

    def read_text(self,name:str)->str:
        return self.file(name).read_text(encoding='utf-8')

    def read_json(self,name:str)->Any:
        return json.loads(self.read_text(name))

    def has_array(self,name:str)->bool:
        spec=self.manifest.arrays.get(name)
        return spec is not None and self.has(spec.file)

    def array(self,name:str)->np.ndarray:
        spec=self.manifest.arrays.get(name)
        if spec is None:
            raise ArtifactError(f"{self.kind} artifact {self.path} has no array '{name}'")
        data=self.read_bytes(spec.file)
        values=decode_array(data) if spec.file.endswith(BINARY_SUFFIX) else decode_csv(data,spec.shape)
        if list(values.shape)!=spec.shape:
            raise ArtifactError(f"Array '{name}' has shape {list(values.shape)}, manifest says {spec.shape}")
        return values.astype(spec.dtype) if spec.dtype!='float32' else values

    def upstream(self,kind:str)->tuple[Path,Manifest]:
        '''Nearest artifact of the given kind in the provenance chain.'''
        for path,manifest in self.chain:
            if manifest.kind==kind:
                return path,manifest
        raise ProvenanceError(f"{self.kind} artifact {self.path} has no {kind} upstream")

def verify_files(path:Path, manifest:Manifest):
    for name,expected in manifest.files.items():
        target=path/name
        if not target.is_file():
            if manifest.is_optional(name):
                continue
            raise HashMismatchError(f"Artifact {path} is missing file '{name}'")
        if file_hash(target)!=expected:
            raise HashMismatchError(f"Hash mismatch for '{name}' in {path}: file changed after it was written")
    if content_identity(manifest.files,manifest.volatile)!=manifest.content_hash:
        raise HashMismatchError(f"Manifest of {path} does not match its recorded content hash")

def resolve_chain(path:Path, manifest:Manifest)->list[tuple[Path,Manifest]]:
    '''Follow upstream references back to their roots, checking kinds, hashes and acyclicity.'''
    chain=[]
    visited=set()

    def visit(current:Path,current_manifest:Manifest,ancestors:frozenset[str]):
        required=REQUIRED_UPSTREAM.get(current_manifest.kind)
        if required is not None and current_manifest.upstream_of(required) is None:
            raise ProvenanceError(f"{current_manifest.kind} artifact {current} lacks a {required} upstream reference")
        for ref in current_manifest.upstream:
            location=(current/ref.path).resolve()
            if ref.hash in ancestors:
                raise ProvenanceError(f"Provenance cycle through {location}")
            try:
                upstream=read_manifest(location)
            except ArtifactError as error:
                raise ProvenanceError(f"Upstream {ref.kind} of {current} is unreadable: {error}") from None
            if upstream.kind!=ref.kind:
                raise ProvenanceError(f"Upstream {location} is a {upstream.kind} artifact, reference says {ref.kind}")
            if upstream.content_hash!=ref.hash:
                raise ProvenanceError(f"Upstream {ref.kind} at {location} changed since {current} was written")
            if ref.hash in visited:
                continue
            visited.add(ref.hash)
            chain.append((location,upstream))
            visit(location,upstream,ancestors|{ref.hash})

    visit(path,manifest,frozenset({manifest.content_hash}))
    return chain

def read_artifact(path:str|Path, expected_kind:str|None=None, verify:bool=True, resolve:bool=True)->Artifact:
    '''
    Open an artifact after checking its version, kind and file hashes, and resolve its provenance chain.
    '''
    path=Path(path)
    manifest=read_manifest(path)
    if expected_kind is not None and manifest.kind!=expected_kind:
        raise ArtifactKindError(f"Expected a {expected_kind} artifact at {path}, found {manifest.kind}")
    if verify:
        verify_files(path,manifest)
    chain=resolve_chain(path,manifest) if resolve else []
    logger.debug(f"[Store] Read {manifest.kind} artifact {path} (chain of {len(chain)})")
    return Artifact(path,manifest,chain)

def array_payload(name:str, array:np.ndarray, fmt:str=BINARY, axes:list[str]|None=None,
    dtype:str|None=None)->tuple[str,bytes,ArraySpec]:
    '''File name, encoded bytes and manifest entry for one array in the chosen format.'''
    if fmt not in FORMATS:
        raise ValueError(f"Unknown array format '{fmt}', expected one of {list(FORMATS)}")
    array=np.asarray(array)
    axes=axes or [f'axis{axis}' for axis in range(array.ndim)]
    if fmt==CSV:
        file,data=f'{name}.csv',encode_csv(array,axes)
    else:
        file,data=f'{name}{BINARY_SUFFIX}',encode_array(array)
    spec=ArraySpec(file=file,shape=list(array.shape),dtype=dtype or 'float32',axes=axes)
    return file,data,spec
