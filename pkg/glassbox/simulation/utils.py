from pydantic import BaseModel
import numpy as np
import hashlib
import json

def derive_seed(master_seed:int, purpose:str)->int:
    '''
    Derive a 64-bit sub-seed for one purpose from the master seed.

    The sub-seed is the first 8 bytes (little-endian) of SHA-256("<master_seed>:<purpose>").
    '''
    digest=hashlib.sha256(f'{master_seed}:{purpose}'.encode('utf-8')).digest()
    return int.from_bytes(digest[:8],'little')

def make_rng(master_seed:int, purpose:str)->np.random.Generator:
    '''numpy PCG64 generator keyed by (master_seed, purpose).'''
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed,purpose)))

def config_digest(config:BaseModel)->str:
    '''SHA-256 of the canonical JSON form of a configuration: sorted keys, compact separators.'''
    document=json.dumps(config.model_dump(mode='json'),sort_keys=True,separators=(',',':'))
    return hashlib.sha256(document.encode('utf-8')).hexdigest()
