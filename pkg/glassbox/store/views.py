from glassbox.store.config import MAGIC, FORMAT_VERSION, KINDS
from pydantic import BaseModel, ConfigDict, Field, field_validator
from datetime import datetime, timezone
from typing import Any, Optional
from uuid_extensions import uuid7str

class ArtifactError(ValueError):
    '''An artifact on disk cannot be used as requested.'''

class HashMismatchError(ArtifactError):
    '''A file's content no longer matches the hash recorded in its manifest.'''

class ProvenanceError(ArtifactError):
    '''An upstream reference is missing, changed or of the wrong kind.'''

class ArtifactKindError(ArtifactError):
    '''The artifact is of a different kind than the caller expected.'''

class UnsupportedVersionError(ArtifactError):
    '''The artifact was written in a format version this release cannot read.'''

class ArraySpec(BaseModel):
    model_config=ConfigDict(extra='forbid')

    file:str
    shape:list[int]
    dtype:str='float32'
    axes:Optional[list[str]]=None

class ArtifactRef(BaseModel):
    '''Pointer to an upstream artifact by kind, location relative to the referring artifact, and content hash.'''
    model_config=ConfigDict(extra='forbid')

    kind:str
    path:str
    hash:str

class Manifest(BaseModel):
    model_config=ConfigDict(extra='forbid')

    magic:str=MAGIC.decode('ascii')
    format_version:int=FORMAT_VERSION
    kind:str
    run_id:str=Field(default_factory=uuid7str)
    created:str=Field(default_factory=lambda:datetime.now(timezone.utc).isoformat())
    config:dict[str,Any]=Field(default_factory=dict)
    seed:Optional[int]=None
    files:dict[str,str]=Field(default_factory=dict,description="Relative path -> SHA-256 of the file")
    arrays:dict[str,ArraySpec]=Field(default_factory=dict)
    upstream:list[ArtifactRef]=Field(default_factory=list)
    optional:list[str]=Field(default_factory=list,description="Path prefixes that may be removed after writing")
    volatile:list[str]=Field(default_factory=list,description="Files left out of the content hash (timings, machine)")
    summary:dict[str,Any]=Field(default_factory=dict)
    content_hash:str=''

    @field_validator('kind')
    @classmethod
    def check_kind(cls,kind:str)->str:
        if kind not in KINDS:
            raise ValueError(f"Unknown artifact kind '{kind}', expected one of {list(KINDS)}")
        return kind

    def is_optional(self,name:str)->bool:
        return any(name==prefix or name.startswith(prefix.rstrip('/')+'/') for prefix in self.optional)

    def upstream_of(self,kind:str)->Optional[ArtifactRef]:
        return next((ref for ref in self.upstream if ref.kind==kind),None)
