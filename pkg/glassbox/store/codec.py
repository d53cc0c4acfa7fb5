from glassbox.store.config import MAGIC, CSV_FLOAT_FORMAT
from pathlib import Path
import numpy as np
import hashlib
import struct
import io

HEADER=struct.Struct('<4sI')
DIM=struct.Struct('<I')

def encode_array(array:np.ndarray)->bytes:
    '''GBL1 binary tensor: magic, u32 rank, u32 dims, then row-major little-endian float32 values.'''
    array=np.asarray(array)
    if not np.issubdtype(array.dtype,np.number) and array.dtype!=np.bool_:
        raise ValueError(f"GBL1 stores numeric arrays, got dtype {array.dtype}")
    values=np.ascontiguousarray(array,dtype='<f4')
    header=HEADER.pack(MAGIC,values.ndim)+b''.join(DIM.pack(size) for size in values.shape)
    return header+values.tobytes(order='C')

def decode_array(data:bytes)->np.ndarray:
    if len(data)<HEADER.size:
        raise ValueError("GBL1 payload is shorter than its header")
    magic,rank=HEADER.unpack_from(data,0)
    if magic!=MAGIC:
        raise ValueError(f"Bad magic {magic!r}, expected {MAGIC!r}")
    offset=HEADER.size
    shape=tuple(DIM.unpack_from(data,offset+DIM.size*axis)[0] for axis in range(rank))
    offset+=DIM.size*rank
    expected=int(np.prod(shape,dtype=np.int64))*4
    if len(data)-offset!=expected:
        raise ValueError(f"GBL1 payload for shape {shape} should hold {expected} bytes, found {len(data)-offset}")
    if not expected:
        return np.zeros(shape,dtype=np.float32)
    return np.frombuffer(data,dtype='<f4',offset=offset).reshape(shape).astype(np.float32)

def write_array(path:str|Path, array:np.ndarray)->Path:
    path=Path(path)
    path.write_bytes(encode_array(array))
    return path

def read_array(path:str|Path)->np.ndarray:
    return decode_array(Path(path).read_bytes())

def encode_csv(array:np.ndarray, axes:list[str]|tuple[str,...], labels:dict[int,np.ndarray]|None=None)->bytes:
    '''
    Long-format CSV: one row per element with its index along every axis and its value, e.g.
    subject,time,species,value for an (N, T, D) array. `labels` replaces the positions along an axis by
    integer labels such as subject ids.
    '''
    array=np.asarray(array,dtype=np.float32)
    if len(axes)!=array.ndim:
        raise ValueError(f"CSV needs {array.ndim} axis names, got {list(axes)}")
    index=np.indices(array.shape).reshape(array.ndim,-1).T
    for axis,values in (labels or {}).items():
        index[:,axis]=np.asarray(values,dtype=np.int64)[index[:,axis]]
    buffer=io.StringIO()
    buffer.write(','.join([*axes,'value'])+'\n')
    if array.size:
        table=np.column_stack([index.astype(np.float64),array.reshape(-1).astype(np.float64)])
        np.savetxt(buffer,table,delimiter=',',fmt=['%d']*array.ndim+[CSV_FLOAT_FORMAT])
    return buffer.getvalue().encode('utf-8')

def decode_csv(data:bytes, shape:tuple[int,...]|list[int])->np.ndarray:
    shape=tuple(shape)
    array=np.zeros(shape,dtype=np.float32)
    text=data.decode('utf-8')
    lines=text.splitlines()
    if len(lines)<=1:
        if int(np.prod(shape,dtype=np.int64)):
            raise ValueError(f"CSV holds no values for shape {shape}")
        return array
    table=np.loadtxt(io.StringIO(text),delimiter=',',skiprows=1,ndmin=2,dtype=np.float64)
    if table.shape[1]!=len(shape)+1:
        raise ValueError(f"CSV has {table.shape[1]} columns, expected {len(shape)+1} for shape {shape}")
    index=tuple(table[:,axis].astype(np.int64) for axis in range(len(shape)))
    array[index]=table[:,-1].astype(np.float32)
    return array

def file_hash(path:str|Path)->str:
    digest=hashlib.sha256()
    with open(path,'rb') as handle:
        for block in iter(lambda:handle.read(1<<20),b''):
            digest.update(block)
    return digest.hexdigest()

def bytes_hash(data:bytes)->str:
    return hashlib.sha256(data).hexdigest()
