from glassbox.transformer.config import INIT_STD, MLP_RATIO
from glassbox.autodiff import Tensor, ops, parameter, zeros, ones
import numpy as np

class Module:
    '''Container of named trainable tensors and child modules, discovered in attribute order.'''
    def named_parameters(self,prefix:str='')->list[tuple[str,Tensor]]:
        named=[]
        for name,value in vars(self).items():
            if isinstance(value,Tensor) and value.requires_grad:
                named.append((prefix+name,value))
            elif isinstance(value,Module):
                named.extend(value.named_parameters(f'{prefix}{name}.'))
            elif isinstance(value,list):
                for index,item in enumerate(value):
                    if isinstance(item,Module):
                        named.extend(item.named_parameters(f'{prefix}{name}.{index}.'))
        return named

    def parameters(self)->list[Tensor]:
        return [tensor for _,tensor in self.named_parameters()]

    def state_dict(self)->dict[str,np.ndarray]:
        return {name:tensor.data.copy() for name,tensor in self.named_parameters()}

    def load_state_dict(self,state:dict[str,np.ndarray]):
        named=dict(self.named_parameters())
        missing=sorted(set(named)-set(state))
        unexpected=sorted(set(state)-set(named))
        if missing or unexpected:
            raise ValueError(f"State mismatch: missing {missing}, unexpected {unexpected}")
        for name,tensor in named.items():
            if state[name].shape!=tensor.shape:
                raise ValueError(f"Parameter {name}: expected shape {tensor.shape}, got {state[name].shape}")
            tensor.data[...]=state[name]

    def zero_grad(self):
        for tensor in self.parameters():
            tensor.zero_grad()

    def n_parameters(self)->int:
        return sum(tensor.size for tensor in self.parameters())

    def __call__(self,*args,**kwargs):
        return self.forward(*args,**kwargs)

class Linear(Module):
    def __init__(self,n_in:int,n_out:int,rng:np.random.Generator,std:float=INIT_STD):
        self.weight=parameter(rng,(n_in,n_out),std)
        self.bias=zeros((n_out,),requires_grad=True)

    def forward(self,x:Tensor)->Tensor:
        return ops.add(ops.matmul(x,self.weight),self.bias)

class LayerNorm(Module):
    def __init__(self,n:int):
        self.weight=ones((n,),requires_grad=True)
        self.bias=zeros((n,),requires_grad=True)

    def forward(self,x:Tensor)->Tensor:
        return ops.layer_norm(x,self.weight,self.bias)

def causal_mask(T:int)->np.ndarray:
    '''True above the diagonal: position t may not look at later positions.'''
    return np.triu(np.ones((T,T),dtype=bool),k=1)

def scaled_dot_product(q:Tensor, k:Tensor, v:Tensor, mask:np.ndarray|None=None)->tuple[Tensor,Tensor]:
    '''softmax(q k^T / sqrt(d) with masked scores at -inf) v, returning the output and the attention weights.'''
    scores=ops.scale(ops.matmul(q,ops.transpose(k)),1.0/np.sqrt(q.shape[-1]))
    if mask is not None:
        scores=ops.masked_fill(scores,mask,-np.inf)
    weights=ops.softmax(scores,axis=-1)
    return ops.matmul(weights,v),weights

class MultiHeadAttention(Module):
    def __init__(self,n_embd:int,n_head:int,rng:np.random.Generator,causal:bool=True):
        if n_embd%n_head!=0:
            raise ValueError(f"n_embd ({n_embd}) must be divisible by n_head ({n_head})")
        self.n_head=n_head
        self.causal=causal
        self.query=Linear(n_embd,n_embd,rng)
        self.key=Linear(n_embd,n_embd,rng)
        self.value=Linear(n_embd,n_embd,rng)
        self.proj=Linear(n_embd,n_embd,rng)

    def _split_heads(self,x:Tensor)->Tensor:
        B,T,E=x.shape
        return ops.transpose(ops.reshape(x,(B,T,self.n_head,E//self.n_head)),(0,2,1,3))

    def attend(self,x:Tensor)->tuple[Tensor,Tensor]:
        '''Output (B, T, E) and per-head attention weights (B, H, T, T).'''
        B,T,E=x.shape
        mask=causal_mask(T) if self.causal else None
        heads,weights=scaled_dot_product(self._split_heads(self.query(x)),self._split_heads(self.key(x)),
            self._split_heads(self.value(x)),mask)
        merged=ops.reshape(ops.transpose(heads,(0,2,1,3)),(B,T,E))
        return self.proj(merged),weights

    def forward(self,x:Tensor)->Tensor:
        return self.attend(x)[0]

class MLP(Module):
    def __init__(self,n_embd:int,rng:np.random.Generator):
        self.fc=Linear(n_embd,MLP_RATIO*n_embd,rng)
        self.proj=Linear(MLP_RATIO*n_embd,n_embd,rng)

    def forward(self,x:Tensor)->Tensor:
        return self.proj(ops.relu(self.fc(x)))

class Block(Module):
    '''Pre-norm residual block: x + attn(ln(x)), then x + mlp(ln(x)).'''
    def __init__(self,n_embd:int,n_head:int,rng:np.random.Generator,causal:bool=True):
        self.ln_1=LayerNorm(n_embd)
        self.attn=MultiHeadAttention(n_embd,n_head,rng,causal)
        self.ln_2=LayerNorm(n_embd)
        self.mlp=MLP(n_embd,rng)

    def forward(self,x:Tensor)->Tensor:
        x=ops.add(x,self.attn(self.ln_1(x)))
        return ops.add(x,self.mlp(self.ln_2(x)))

class Encoder(Module):
    '''Learned positional embeddings, n_layer blocks and a final layer norm over (B, T, n_embd) tokens.'''
    def __init__(self,n_embd:int,n_positions:int,n_layer:int,n_head:int,rng:np.random.Generator,causal:bool=True):
        self.n_embd=n_embd
        self.position=parameter(rng,(n_positions,n_embd))
        self.blocks=[Block(n_embd,n_head,rng,causal) for _ in range(n_layer)]
        self.ln_f=LayerNorm(n_embd)

    def hidden_states(self,x:Tensor)->list[Tensor]:
        '''Token states after the positional embedding, after each block, and after the final norm.'''
        if x.ndim!=3 or x.shape[-1]!=self.n_embd:
            raise ValueError(f"Encoder expects (B, T, {self.n_embd}) tokens, got {x.shape}")
        states=[ops.embedding_add(x,self.position)]
        for block in self.blocks:
            states.append(block(states[-1]))
        states.append(self.ln_f(states[-1]))
        return states

    def forward(self,x:Tensor)->Tensor:
        return self.hidden_states(x)[-1]

class TransformerClassifier(Module):
    '''Encoder, mean pooling over time, one logit.'''
    def __init__(self,encoder:Encoder,rng:np.random.Generator):
        self.encoder=encoder
        self.head=Linear(encoder.n_embd,1,rng)

    def forward(self,x:Tensor)->Tensor:
        pooled=ops.mean_pool(self.encoder(x),axis=1)
        return ops.reshape(self.head(pooled),(x.shape[0],))

class ConceptBottleneck(Module):
    '''
    Encoder, a linear map from the flattened (T x n_embd) final states to n_concept logits, and a head that sees
    only the concept logits: three ReLU layers of width n_concept and one output logit.
    '''
    def __init__(self,encoder:Encoder,n_positions:int,n_concept:int,rng:np.random.Generator):
        self.encoder=encoder
        self.n_positions=n_positions
        self.concept=Linear(n_positions*encoder.n_embd,n_concept,rng)
        self.hidden=[Linear(n_concept,n_concept,rng) for _ in range(3)]
        self.out=Linear(n_concept,1,rng)

    def concepts(self,x:Tensor)->Tensor:
        B,T,E=x.shape
        if T!=self.n_positions:
            raise ValueError(f"Concept bottleneck expects T={self.n_positions} timepoints, got T={T}")
        return self.concept(ops.reshape(self.encoder(x),(B,T*E)))

    def head(self,concept_logits:Tensor)->Tensor:
        h=concept_logits
        for layer in self.hidden:
            h=ops.relu(layer(h))
        return ops.reshape(self.out(h),(concept_logits.shape[0],))

    def forward(self,x:Tensor)->tuple[Tensor,Tensor]:
        concept_logits=self.concepts(x)
        return concept_logits,self.head(concept_logits)
